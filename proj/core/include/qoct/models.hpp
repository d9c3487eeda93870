// models.hpp — catalog of systems, gates, noise channels, initial-state sets,
// and trial fields used by the experiments.
#pragma once

#include <string>
#include <vector>

#include "qoct/krotov.hpp"

namespace qoct {

struct SystemSpec {
  std::string name;
  int dim = 0;
  Matrix H0, H1;
  std::vector<int> computational_levels;
};

struct GateSpec {
  std::string name;
  Matrix O;
  std::vector<int> acts_on;   // levels on which O is unitary
};

struct StateSet {
  std::string name;
  std::vector<WeightedState> states;   // weights sum to 1
};

// ------- Pauli matrices -------

Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();

// ------- systems -------

// H0 = -sigma_z, H1 = sigma_x (hbar = omega0 = 1).
SystemSpec build_qubit();
// H0 = -diag(1, 0, -1); H1 has ones at (0,2), (1,2), (2,0), (2,1).
SystemSpec build_qutrit();
// H0 = J1 sz(x)I + J2 I(x)sz + J12 sz(x)sz, H1 = sx(x)I + I(x)sx; all four levels computational.
SystemSpec build_two_qubit(double J1 = -2.0, double J2 = -0.2, double J12 = 0.1);
// Same matrices as build_two_qubit; computational levels {0, 1}, levels {2, 3} are leakage.
SystemSpec build_four_level(double J1 = -2.0, double J2 = -0.2, double J12 = 0.1);
// Names: qubit, qutrit, two_qubit, four_level.
SystemSpec system_catalog(const std::string& name);

// ------- gates -------

// Names: qft, u1..u4 (qubit and qutrit), x_first_qubit (two_qubit), x_subspace (four_level).
GateSpec gate_catalog(const std::string& name, const SystemSpec& sys);

// ------- noise channels -------

// Names: none, dephasing, amp_damping (qubit/qutrit), leak_i..leak_iv (dim 4);
// every operator carries the same rate gamma.  Damping and leakage operators are
// lowering-type: each decaying level maps onto |0>.
NoiseChannel channel_catalog(const std::string& name, double gamma, const SystemSpec& sys);

// ------- initial-state sets -------

// Names: basis_plus_superposition (computational basis states plus their uniform
// superposition, equal weights), goerz (qubit; weights 0.8, 0.1, 0.1),
// leakage_set (levels {0,1} basis plus superposition, equal weights).
StateSet state_set_catalog(const std::string& name, const SystemSpec& sys);

// ------- couplings and trial fields -------

// H1 with ones exactly on the nonzero pattern of U; rejects asymmetric patterns.
Matrix coupling_from_gate(const Matrix& U);

// E_level - E_0 read off the (diagonal) drift.
double bohr_frequency(const SystemSpec& sys, int level);

// sin^2 switch-on/off ramps of width t_r; 1 on the plateau.
double switch_envelope(double t, double T, double t_r);

// eps(t) = A0 S(t), sampled at interval midpoints; reference = samples.
ControlField trial_field(const TimeGrid& grid, double A0, double t_r);
// eps(t) = A0 S(t) sin(omega t); the envelope stays S(t).
ControlField resonant_trial(const TimeGrid& grid, double A0, double t_r, double omega);

}  // namespace qoct
