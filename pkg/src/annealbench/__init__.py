"""Ising encodings of 2D minimisation problems and a four-way optimizer race.

Core pieces:

- ising: sparse Ising problems, energies, the ferromagnetic 2D grid
- dwe: domain-wall encoding of tabulated landscapes, exact on faithful states
- potentials: the three benchmark landscapes with gradients and a truth oracle
- thermal: Metropolis annealing under temperature schedules
- sqa: path-integral Monte Carlo emulation of a transverse-field annealer
- descent: Nelder-Mead and conjugate gradient on the continuous landscapes
- harness: sweeps, basin maps, histograms, timing, CSV/manifest output
"""

from .ising import (GridSpec, IsingProblem, build_2d_grid, delta_energy, energy,
                    magnetisation, normalized_energy, random_spin_state)
from .dwe import (DecodedSample, DwLayout, PotentialTable, auto_penalties,
                  build_chain, chain_baseline, decode, encode, encode_potential,
                  layout_for, plant_state, sample_table)
from .potentials import (Potential, TruthRecord, distance_to_truth,
                         load_potential_csv, true_minimum, u1, u2, u3)
from .thermal import (ThermalResult, ThermalSchedule, acceptance_probability,
                      metropolis_sweep, preset_schedule, run_thermal)
from .descent import CgParams, NmParams, OptResult, conjugate_gd, nelder_mead
from .sqa import (NoValidReadsError, QuantumSchedule, ReadSet, SqaConfig,
                  TransverseCurves, effective_energy, mode_of_reads, readout,
                  slice_coupling, sqa_run)
from .harness import (BenchConfig, QaConfig, RunRecord, SweepResult, TaConfig,
                      basin_map, distance_histograms, grid_size_study,
                      ising_lambda_sweep, ising_thermal_sweep,
                      lambda_scaling_study, success_fraction, success_threshold,
                      timing_table)

__version__ = "0.1.0"
