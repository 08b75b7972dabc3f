#include "pcsm/problems.hpp"

#include "pcsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

namespace pcsm::problems {

namespace {

// Offsets of each block in the flat parameter vector.
struct Layout {
  Index w1, b1, w2, b2, w3, b3;
  explicit Layout(Index h)
      : w1(0), b1(h), w2(2 * h), b2(2 * h + h * h), w3(3 * h + h * h), b3(4 * h + h * h) {}
};

// Degree-2 Taylor coefficients of every hidden activation at one time, plus
// scratch for the reverse sweep. One buffer of 18 h doubles, reused per thread.
struct Tape {
  std::vector<double> buf;
  Index h = 0;
  double* a1; double* d1; double* dd1; double* s1p; double* s1pp; double* s1ppp; double* z1p;
  double* a2; double* d2; double* dd2; double* s2p; double* s2pp; double* s2ppp; double* z2p;
  double* z2pp; double* g0; double* g1; double* g2;
  TaylorOutput out;

  void resize(Index hidden) {
    if (hidden == h) return;
    h = hidden;
    buf.assign(static_cast<std::size_t>(18 * h), 0.0);
    double* base = buf.data();
    double** slots[] = {&a1, &d1, &dd1, &s1p, &s1pp, &s1ppp, &z1p, &a2, &d2,
                        &dd2, &s2p, &s2pp, &s2ppp, &z2p, &z2pp, &g0, &g1, &g2};
    for (double** slot : slots) {
      *slot = base;
      base += h;
    }
  }
};

Tape& thread_tape(Index h) {
  thread_local Tape tape;
  tape.resize(h);
  return tape;
}

void check_length(const MlpSpec& spec, const Vector& params) {
  if (params.size() != spec.num_parameters()) {
    throw PcsmError(ErrorCode::InvalidArgument, "mlp: parameter vector has wrong length");
  }
}

// tanh and its first three derivatives.
inline void tanh_derivs(double z, double& s, double& sp, double& spp, double& sppp) {
  s = std::tanh(z);
  sp = 1.0 - s * s;
  spp = -2.0 * s * sp;
  sppp = -2.0 * sp * sp - 2.0 * s * spp;
}

void forward(const MlpSpec& spec, const double* p, double t, Tape& tp) {
  const Index h = spec.hidden;
  const Layout at(h);
  const double k = spec.input_scale;
  const double* w1 = p + at.w1;
  const double* b1 = p + at.b1;
  const double* w2 = p + at.w2;
  const double* b2 = p + at.b2;
  const double* w3 = p + at.w3;

  for (Index j = 0; j < h; ++j) {
    tp.z1p[j] = k * w1[j];
    tanh_derivs(tp.z1p[j] * t + b1[j], tp.a1[j], tp.s1p[j], tp.s1pp[j], tp.s1ppp[j]);
    tp.d1[j] = tp.s1p[j] * tp.z1p[j];
    tp.dd1[j] = tp.s1pp[j] * tp.z1p[j] * tp.z1p[j];
  }
  double u = p[at.b3], du = 0.0, ddu = 0.0;
  for (Index i = 0; i < h; ++i) {
    const double* row = w2 + i * h;
    double z = b2[i], zp = 0.0, zpp = 0.0;
    for (Index j = 0; j < h; ++j) {
      z += row[j] * tp.a1[j];
      zp += row[j] * tp.d1[j];
      zpp += row[j] * tp.dd1[j];
    }
    tp.z2p[i] = zp;
    tp.z2pp[i] = zpp;
    tanh_derivs(z, tp.a2[i], tp.s2p[i], tp.s2pp[i], tp.s2ppp[i]);
    tp.d2[i] = tp.s2p[i] * zp;
    tp.dd2[i] = tp.s2pp[i] * zp * zp + tp.s2p[i] * zpp;
    u += w3[i] * tp.a2[i];
    du += w3[i] * tp.d2[i];
    ddu += w3[i] * tp.dd2[i];
  }
  tp.out = {u, du, ddu};
}

// Reverse sweep of gu*u + g1*u' + g2*u'' through a recorded forward pass.
// Accumulates into grad.
void backward(const MlpSpec& spec, const double* p, double t, Tape& tp, double gu, double gv,
              double ga, double* grad) {
  const Index h = spec.hidden;
  const Layout at(h);
  const double k = spec.input_scale;
  const double* w2 = p + at.w2;
  const double* w3 = p + at.w3;

  grad[at.b3] += gu;
  // Adjoints of z2, z2' and z2''.
  double* gz2 = tp.g0;
  double* gz2p = tp.g1;
  double* gz2pp = tp.g2;
  for (Index i = 0; i < h; ++i) {
    grad[at.w3 + i] += gu * tp.a2[i] + gv * tp.d2[i] + ga * tp.dd2[i];
    const double ga2 = gu * w3[i], gd2 = gv * w3[i], gdd2 = ga * w3[i];
    const double zp = tp.z2p[i];
    gz2[i] = ga2 * tp.s2p[i] + gd2 * tp.s2pp[i] * zp +
             gdd2 * (tp.s2ppp[i] * zp * zp + tp.s2pp[i] * tp.z2pp[i]);
    gz2p[i] = gd2 * tp.s2p[i] + gdd2 * 2.0 * tp.s2pp[i] * zp;
    gz2pp[i] = gdd2 * tp.s2p[i];
    grad[at.b2 + i] += gz2[i];
    double* grow = grad + at.w2 + i * h;
    for (Index j = 0; j < h; ++j) {
      grow[j] += gz2[i] * tp.a1[j] + gz2p[i] * tp.d1[j] + gz2pp[i] * tp.dd1[j];
    }
  }
  for (Index j = 0; j < h; ++j) {
    double ga1 = 0.0, gd1 = 0.0, gdd1 = 0.0;
    for (Index i = 0; i < h; ++i) {
      const double w = w2[i * h + j];
      ga1 += w * gz2[i];
      gd1 += w * gz2p[i];
      gdd1 += w * gz2pp[i];
    }
    const double zp = tp.z1p[j];
    const double gz1 = ga1 * tp.s1p[j] + gd1 * tp.s1pp[j] * zp + gdd1 * tp.s1ppp[j] * zp * zp;
    const double gz1p = gd1 * tp.s1p[j] + gdd1 * 2.0 * tp.s1pp[j] * zp;
    grad[at.w1 + j] += k * (gz1 * t + gz1p);
    grad[at.b1 + j] += gz1;
  }
}

struct OscillatorCoefficients {
  double decay;   // gamma = damping / (2 mass)
  double omega;   // damped angular frequency
  double a;       // cosine coefficient
  double b;       // sine coefficient
};

OscillatorCoefficients oscillator(const MlpSpec& spec) {
  const double gamma = spec.damping / (2.0 * spec.mass);
  const double w2 = spec.stiffness / spec.mass - gamma * gamma;
  if (!(w2 > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "oscillator must be underdamped");
  }
  const double omega = std::sqrt(w2);
  return {gamma, omega, spec.u0, (spec.v0 + gamma * spec.u0) / omega};
}

constexpr double kFdRelativeStep = 1e-5;

}  // namespace

TaylorOutput mlp_forward_t2(const MlpSpec& spec, const Vector& params, double t) {
  check_length(spec, params);
  Tape& tp = thread_tape(spec.hidden);
  forward(spec, params.data(), t, tp);
  return tp.out;
}

Vector mlp_parameter_gradient(const MlpSpec& spec, const Vector& params, double t, double gu,
                              double g1, double g2) {
  check_length(spec, params);
  Tape& tp = thread_tape(spec.hidden);
  forward(spec, params.data(), t, tp);
  Vector grad = Vector::Zero(spec.num_parameters());
  backward(spec, params.data(), t, tp, gu, g1, g2, grad.data());
  return grad;
}

double oscillator_solution(const MlpSpec& spec, double t) {
  const auto o = oscillator(spec);
  return std::exp(-o.decay * t) * (o.a * std::cos(o.omega * t) + o.b * std::sin(o.omega * t));
}

double oscillator_velocity(const MlpSpec& spec, double t) {
  const auto o = oscillator(spec);
  const double c = std::cos(o.omega * t);
  const double s = std::sin(o.omega * t);
  return std::exp(-o.decay * t) *
         ((o.b * o.omega - o.decay * o.a) * c - (o.a * o.omega + o.decay * o.b) * s);
}

double oscillator_acceleration(const MlpSpec& spec, double t) {
  return -(spec.damping * oscillator_velocity(spec, t) + spec.stiffness * oscillator_solution(spec, t)) /
         spec.mass;
}

Vector initial_parameters(const MlpSpec& spec, std::uint64_t seed) {
  const Index h = spec.hidden;
  const Layout at(h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector p = Vector::Zero(spec.num_parameters());
  // Layer 1 sees input_scale * t; scale so pre-activations span a few units.
  const double s1 = 4.0 / (spec.t_end * spec.input_scale);
  for (Index k = 0; k < h; ++k) {
    p(at.w1 + k) = s1 * unit(rng);
    p(at.b1 + k) = 2.0 * unit(rng);
  }
  const double s2 = std::sqrt(6.0 / static_cast<double>(2 * h));
  for (Index k = 0; k < h * h; ++k) p(at.w2 + k) = s2 * unit(rng);
  const double s3 = std::sqrt(6.0 / static_cast<double>(h + 1));
  for (Index k = 0; k < h; ++k) p(at.w3 + k) = s3 * unit(rng);
  return p;
}

// --- PinnProblem ----------------------------------------------------------------

PinnProblem::PinnProblem(const MlpSpec& spec)
    : spec_(spec), initial_(std::make_shared<InitialRows>()) {
  if (spec.hidden < 1 || spec.n_objective < 1 || spec.n_samples < 1 || !(spec.t_end > 0.0)) {
    throw PcsmError(ErrorCode::InvalidArgument, "pinn: invalid spec");
  }
  data_.resize(static_cast<std::size_t>(spec.n_objective));
  for (Index k = 0; k < spec.n_objective; ++k) {
    data_[static_cast<std::size_t>(k)] = oscillator_solution(spec, objective_time(k));
  }
}

double PinnProblem::collocation_time(Index i) const {
  return spec_.t_end * static_cast<double>(i + 1) / static_cast<double>(spec_.n_samples);
}

double PinnProblem::objective_time(Index k) const {
  return spec_.t_end * static_cast<double>(k + 1) / static_cast<double>(spec_.n_objective);
}

double PinnProblem::residual(const Vector& x, double t) const {
  const TaylorOutput o = mlp_forward_t2(spec_, x, t);
  return spec_.mass * o.d2u_dt2 + spec_.damping * o.du_dt + spec_.stiffness * o.u;
}

double PinnProblem::mean_residual(const Vector& x) const {
  double sum = 0.0;
  for (Index i = 0; i < spec_.n_samples; ++i) sum += residual(x, collocation_time(i));
  return sum / static_cast<double>(spec_.n_samples);
}

double PinnProblem::objective(const Vector& x) const {
  double data_term = 0.0;
  double residual_term = 0.0;
  for (Index k = 0; k < spec_.n_objective; ++k) {
    const double t = objective_time(k);
    const TaylorOutput o = mlp_forward_t2(spec_, x, t);
    const double e = data_[static_cast<std::size_t>(k)] - o.u;
    const double r = spec_.mass * o.d2u_dt2 + spec_.damping * o.du_dt + spec_.stiffness * o.u;
    data_term += e * e;
    residual_term += r * r;
  }
  return (data_term + residual_term) / static_cast<double>(spec_.n_objective);
}

Vector PinnProblem::objective_gradient(const Vector& x) const {
  check_length(spec_, x);
  Vector grad = Vector::Zero(num_variables());
  Tape& tp = thread_tape(spec_.hidden);
  const double scale = 2.0 / static_cast<double>(spec_.n_objective);
  for (Index k = 0; k < spec_.n_objective; ++k) {
    const double t = objective_time(k);
    forward(spec_, x.data(), t, tp);
    const double e = data_[static_cast<std::size_t>(k)] - tp.out.u;
    const double r = spec_.mass * tp.out.d2u_dt2 + spec_.damping * tp.out.du_dt +
                     spec_.stiffness * tp.out.u;
    // d/dx (e^2 + r^2) = -2 e du + 2 r (stiffness du + damping du' + mass du'')
    backward(spec_, x.data(), t, tp, scale * (-e + r * spec_.stiffness), scale * r * spec_.damping,
             scale * r * spec_.mass, grad.data());
  }
  return grad;
}

// The initial-condition rows are identical in every constraint term, so they
// are computed once per parameter vector.
struct PinnProblem::InitialRows {
  std::mutex mutex;
  bool valid = false;
  Vector x;
  TaylorOutput at_zero;
  Vector grad_u;
  Vector grad_v;
};

void PinnProblem::initial_rows(const Vector& x, TaylorOutput* at_zero, double* grad_u,
                               double* grad_v) const {
  check_length(spec_, x);
  std::lock_guard<std::mutex> lock(initial_->mutex);
  InitialRows& c = *initial_;
  const bool need_grads = grad_u != nullptr || grad_v != nullptr;
  if (!c.valid || c.x.size() != x.size() || c.x != x || (need_grads && c.grad_u.size() == 0)) {
    Tape& tp = thread_tape(spec_.hidden);
    forward(spec_, x.data(), 0.0, tp);
    c.at_zero = tp.out;
    c.x = x;
    c.grad_u.resize(0);
    c.grad_v.resize(0);
    if (need_grads) {
      c.grad_u = Vector::Zero(x.size());
      c.grad_v = Vector::Zero(x.size());
      backward(spec_, x.data(), 0.0, tp, 1.0, 0.0, 0.0, c.grad_u.data());
      backward(spec_, x.data(), 0.0, tp, 0.0, 1.0, 0.0, c.grad_v.data());
    }
    c.valid = true;
  }
  if (at_zero) *at_zero = c.at_zero;
  if (grad_u) std::copy(c.grad_u.data(), c.grad_u.data() + c.grad_u.size(), grad_u);
  if (grad_v) std::copy(c.grad_v.data(), c.grad_v.data() + c.grad_v.size(), grad_v);
}

Vector PinnProblem::constraint_term(const Vector& x, Index i) const {
  check_index(i);
  TaylorOutput o0;
  initial_rows(x, &o0, nullptr, nullptr);
  Vector c(3);
  c(0) = o0.u - spec_.u0;
  c(1) = o0.du_dt - spec_.v0;
  c(2) = residual(x, collocation_time(i));
  return c;
}

Matrix PinnProblem::constraint_term_jacobian(const Vector& x, Index i) const {
  check_index(i);
  const Index n = num_variables();
  Matrix jac(n, 3);
  initial_rows(x, nullptr, jac.col(0).data(), jac.col(1).data());
  jac.col(2).setZero();
  const double t = collocation_time(i);
  Tape& tp = thread_tape(spec_.hidden);
  forward(spec_, x.data(), t, tp);
  backward(spec_, x.data(), t, tp, spec_.stiffness, spec_.damping, spec_.mass, jac.col(2).data());
  return jac;
}

Matrix PinnProblem::objective_hessian(const Vector& x) const {
  const Index n = num_variables();
  Matrix h(n, n);
  Vector xp = x;
  for (Index k = 0; k < n; ++k) {
    const double step = kFdRelativeStep * (1.0 + std::abs(x(k)));
    xp(k) = x(k) + step;
    const Vector gp = objective_gradient(xp);
    xp(k) = x(k) - step;
    const Vector gm = objective_gradient(xp);
    xp(k) = x(k);
    h.col(k) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

std::vector<Matrix> PinnProblem::constraint_term_hessians(const Vector& x, Index i) const {
  check_index(i);
  const Index n = num_variables();
  std::vector<Matrix> hs(3, Matrix(n, n));
  Vector xp = x;
  for (Index k = 0; k < n; ++k) {
    const double step = kFdRelativeStep * (1.0 + std::abs(x(k)));
    xp(k) = x(k) + step;
    const Matrix jp = constraint_term_jacobian(xp, i);
    xp(k) = x(k) - step;
    const Matrix jm = constraint_term_jacobian(xp, i);
    xp(k) = x(k);
    const Matrix d = (jp - jm) / (2.0 * step);
    for (Index j = 0; j < 3; ++j) hs[static_cast<std::size_t>(j)].col(k) = d.col(j);
  }
  for (Matrix& h : hs) h = 0.5 * (h + h.transpose()).eval();
  return hs;
}

Matrix PinnProblem::constraint_term_hessian(const Vector& x, Index i, Index j) const {
  if (j < 0 || j >= 3) throw PcsmError(ErrorCode::IndexOutOfRange, "pinn has m = 3");
  return constraint_term_hessians(x, i)[static_cast<std::size_t>(j)];
}

}  // namespace pcsm::problems
