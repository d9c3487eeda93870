#include "qoct/models.hpp"

#include <cmath>
#include <numbers>

namespace qoct {

namespace {

constexpr double pi = std::numbers::pi;
const Complex i1(0.0, 1.0);

Matrix ketbra(int dim, int i, int j) {
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = Complex(1.0, 0.0);
  return m;
}

Complex phase(double theta) { return std::exp(i1 * theta); }

[[noreturn]] void unknown(const std::string& kind, const std::string& name,
                          const std::string& valid) {
  throw std::invalid_argument("unknown " + kind + " '" + name + "' (valid: " + valid + ")");
}

}  // namespace

Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix sigma_y() {
  Matrix m(2, 2);
  m << 0, -i1, i1, 0;
  return m;
}

Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

SystemSpec build_qubit() {
  SystemSpec sys;
  sys.name = "qubit";
  sys.dim = 2;
  sys.H0 = -sigma_z();
  sys.H1 = sigma_x();
  sys.computational_levels = {0, 1};
  return sys;
}

SystemSpec build_qutrit() {
  SystemSpec sys;
  sys.name = "qutrit";
  sys.dim = 3;
  sys.H0 = Matrix::Zero(3, 3);
  sys.H0(0, 0) = -1.0;
  sys.H0(2, 2) = 1.0;
  sys.H1 = Matrix::Zero(3, 3);
  sys.H1(0, 2) = sys.H1(1, 2) = sys.H1(2, 0) = sys.H1(2, 1) = 1.0;
  sys.computational_levels = {0, 1, 2};
  return sys;
}

SystemSpec build_two_qubit(double J1, double J2, double J12) {
  SystemSpec sys;
  sys.name = "two_qubit";
  sys.dim = 4;
  const Matrix id = identity(2);
  const Matrix sz = sigma_z();
  sys.H0 = J1 * kron(sz, id) + J2 * kron(id, sz) + J12 * kron(sz, sz);
  sys.H1 = kron(sigma_x(), id) + kron(id, sigma_x());
  sys.computational_levels = {0, 1, 2, 3};
  return sys;
}

SystemSpec build_four_level(double J1, double J2, double J12) {
  SystemSpec sys = build_two_qubit(J1, J2, J12);
  sys.name = "four_level";
  sys.computational_levels = {0, 1};
  return sys;
}

SystemSpec system_catalog(const std::string& name) {
  if (name == "qubit") return build_qubit();
  if (name == "qutrit") return build_qutrit();
  if (name == "two_qubit") return build_two_qubit();
  if (name == "four_level") return build_four_level();
  unknown("system", name, "qubit, qutrit, two_qubit, four_level");
}

namespace {

Matrix qubit_gate(const std::string& name) {
  if (name == "qft") return ((sigma_x() + sigma_z()) / std::sqrt(2.0)).eval();
  if (name == "u1") return sigma_x();
  if (name == "u2") return sigma_y();
  if (name == "u3") return sigma_z();
  if (name == "u4") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = phase(pi / 4.0);
    return m;
  }
  unknown("qubit gate", name, "qft, u1, u2, u3, u4");
}

Matrix qutrit_gate(const std::string& name) {
  Matrix m = Matrix::Zero(3, 3);
  if (name == "qft") {
    const Complex w = phase(2.0 * pi / 3.0);
    m << 1, 1, 1,
         1, w, w * w,
         1, w * w, w;
    return m / std::sqrt(3.0);
  }
  if (name == "u1") {
    m << 1, -phase(-2.0 * pi / 3.0), 0,
         -phase(2.0 * pi / 3.0), -1, 0,
         0, 0, -std::sqrt(2.0);
    return m / std::sqrt(2.0);
  }
  if (name == "u2") {
    m << 1, 0, i1 * phase(2.0 * pi / 3.0),
         0, std::sqrt(2.0), 0,
         i1 * phase(-2.0 * pi / 3.0), 0, 1;
    return m / std::sqrt(2.0);
  }
  if (name == "u3") {
    m << std::sqrt(3.0), 0, 0,
         0, -std::sqrt(2.0), i1 * phase(-pi / 6.0),
         0, i1 * phase(pi / 6.0), -std::sqrt(2.0);
    return m / std::sqrt(3.0);
  }
  if (name == "u4") {
    m(0, 0) = phase(pi / 3.0);
    m(1, 1) = phase(pi / 6.0);
    m(2, 2) = phase(-pi / 2.0);
    return m;
  }
  unknown("qutrit gate", name, "qft, u1, u2, u3, u4");
}

}  // namespace

GateSpec gate_catalog(const std::string& name, const SystemSpec& sys) {
  GateSpec gate;
  gate.name = name;
  gate.acts_on = sys.computational_levels;
  if (sys.dim == 2) {
    gate.O = qubit_gate(name);
    return gate;
  }
  if (sys.dim == 3) {
    gate.O = qutrit_gate(name);
    return gate;
  }
  if (name == "x_first_qubit") {
    gate.O = kron(sigma_x(), identity(2));
    return gate;
  }
  if (name == "x_subspace") {
    // X on levels {0, 1} embedded as a partial isometry: zeros on the leakage levels.
    gate.O = ketbra(4, 0, 1) + ketbra(4, 1, 0);
    return gate;
  }
  unknown("gate", name, "x_first_qubit (two_qubit), x_subspace (four_level)");
}

NoiseChannel channel_catalog(const std::string& name, double gamma, const SystemSpec& sys) {
  if (gamma < 0.0) throw std::invalid_argument("channel_catalog: negative rate");
  const int d = sys.dim;
  std::vector<Matrix> ops;
  if (name == "none") {
    return NoiseChannel{};
  } else if (name == "dephasing") {
    if (d == 2) {
      ops = {sigma_z()};
    } else if (d == 3) {
      ops = {ketbra(3, 1, 1) - ketbra(3, 0, 0), ketbra(3, 2, 2) - ketbra(3, 0, 0)};
    } else {
      throw std::invalid_argument("channel_catalog: dephasing is defined for qubit and qutrit");
    }
  } else if (name == "amp_damping") {
    if (d == 2) {
      ops = {ketbra(2, 0, 1)};
    } else if (d == 3) {
      ops = {ketbra(3, 0, 1), ketbra(3, 0, 2)};
    } else {
      throw std::invalid_argument("channel_catalog: amp_damping is defined for qubit and qutrit");
    }
  } else if (name == "leak_i" || name == "leak_ii" || name == "leak_iii" || name == "leak_iv") {
    if (d != 4)
      throw std::invalid_argument("channel_catalog: leakage channels need a 4-level system");
    if (name == "leak_i") ops = {ketbra(4, 0, 1), ketbra(4, 0, 2), ketbra(4, 0, 3)};
    if (name == "leak_ii") ops = {ketbra(4, 0, 1), ketbra(4, 0, 2)};
    if (name == "leak_iii") ops = {ketbra(4, 0, 2), ketbra(4, 0, 3)};
    if (name == "leak_iv") ops = {ketbra(4, 0, 1)};
  } else {
    unknown("channel", name, "none, dephasing, amp_damping, leak_i, leak_ii, leak_iii, leak_iv");
  }
  std::vector<NoiseTerm> terms;
  terms.reserve(ops.size());
  for (Matrix& L : ops) terms.push_back({std::move(L), gamma});
  return NoiseChannel(std::move(terms));
}

namespace {

Matrix projector_on(const std::vector<int>& levels, int dim) {
  Vector psi = Vector::Zero(dim);
  for (int l : levels) psi(l) = Complex(1.0, 0.0);
  psi /= std::sqrt(static_cast<double>(levels.size()));
  return psi * psi.adjoint();
}

}  // namespace

StateSet state_set_catalog(const std::string& name, const SystemSpec& sys) {
  StateSet set;
  set.name = name;
  if (name == "basis_plus_superposition" || name == "leakage_set") {
    std::vector<int> levels =
        name == "leakage_set" ? std::vector<int>{0, 1} : sys.computational_levels;
    if (name == "leakage_set" && sys.dim < 2)
      throw std::invalid_argument("state_set_catalog: leakage_set needs dim >= 2");
    const double w = 1.0 / (levels.size() + 1.0);
    for (int l : levels) set.states.push_back({ketbra(sys.dim, l, l), w});
    set.states.push_back({projector_on(levels, sys.dim), w});
    return set;
  }
  if (name == "goerz") {
    if (sys.dim != 2)
      throw std::invalid_argument("state_set_catalog: goerz set is defined for the qubit");
    const Matrix mixed = (2.0 / 3.0) * ketbra(2, 0, 0) + (1.0 / 3.0) * ketbra(2, 1, 1);
    set.states.push_back({mixed, 0.8});
    set.states.push_back({projector_on({0, 1}, 2), 0.1});
    set.states.push_back({(0.5 * identity(2)).eval(), 0.1});
    return set;
  }
  unknown("state set", name, "basis_plus_superposition, goerz, leakage_set");
}

Matrix coupling_from_gate(const Matrix& U) {
  if (U.rows() != U.cols()) throw std::invalid_argument("coupling_from_gate: U not square");
  const Eigen::Index d = U.rows();
  Matrix H = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool nz = std::abs(U(i, j)) > 1e-12;
      if (nz != (std::abs(U(j, i)) > 1e-12))
        throw std::invalid_argument("coupling_from_gate: nonzero pattern is not symmetric");
      if (nz) H(i, j) = Complex(1.0, 0.0);
    }
  return H;
}

double bohr_frequency(const SystemSpec& sys, int level) {
  if (level < 0 || level >= sys.dim) throw std::invalid_argument("bohr_frequency: bad level");
  Matrix offdiag = sys.H0;
  offdiag.diagonal().setZero();
  if (offdiag.cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("bohr_frequency: drift is not diagonal");
  return std::real(sys.H0(level, level) - sys.H0(0, 0));
}

double switch_envelope(double t, double T, double t_r) {
  if (!(t_r > 0.0 && 2.0 * t_r <= T))
    throw std::invalid_argument("switch_envelope: need 0 < t_r <= T/2");
  if (t <= 0.0 || t >= T) return 0.0;
  if (t < t_r) {
    const double s = std::sin(pi * t / (2.0 * t_r));
    return s * s;
  }
  if (t > T - t_r) {
    const double s = std::sin(pi * (T - t) / (2.0 * t_r));
    return s * s;
  }
  return 1.0;
}

namespace {

ControlField modulated_trial(const TimeGrid& grid, double A0, double t_r, double omega,
                             bool resonant) {
  ControlField field;
  field.grid = grid;
  field.samples.resize(grid.N);
  field.envelope.resize(grid.N);
  field.reference.resize(grid.N);
  for (int n = 0; n < grid.N; ++n) {
    const double t = grid.mid(n);
    const double S = switch_envelope(t, grid.T, t_r);
    field.envelope[n] = S;
    field.samples[n] = resonant ? A0 * S * std::sin(omega * t) : A0 * S;
    field.reference[n] = field.samples[n];
  }
  return field;
}

}  // namespace

ControlField trial_field(const TimeGrid& grid, double A0, double t_r) {
  return modulated_trial(grid, A0, t_r, 0.0, false);
}

ControlField resonant_trial(const TimeGrid& grid, double A0, double t_r, double omega) {
  return modulated_trial(grid, A0, t_r, omega, true);
}

}  // namespace qoct
