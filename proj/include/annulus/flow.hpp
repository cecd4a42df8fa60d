#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annulus/energy.hpp"

namespace annulus {

struct FlowConfig {
  double step_size = 1.0;
  int max_iterations = 2000;
  double grad_tol = 1e-8;
  int degree_check_interval = 1;
  std::uint64_t seed = 0;
  // Amplitude of the seeded interior perturbation applied before the flow.
  double perturbation = 0.0;
  // Mass shift of the preconditioner, Dirichlet Hessian + shift * mass.
  // 0 selects 1 / (1-R)^2.
  double preconditioner_shift = 0.0;
  // Largest nodal change per step.
  double trust_radius = 0.25;
  int max_backtracks = 60;
  // Midpoint modulus on a boundary edge below which a degeneracy is flagged.
  double degeneracy_threshold = 0.5;

  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  EnergyReport energy;
  DegreeReading degrees;
  double min_modulus = 1.0;  // over interior nodes
  double min_r = 0.0;
  double min_theta = 0.0;
  double interior_residual = 0.0;
  double boundary_residual = 0.0;
};

enum class FlowEventKind { boundary_degeneracy, degree_jump };

struct FlowEvent {
  FlowEventKind kind;
  int iteration;
  Boundary boundary;
  int from = 0;  // degrees before and after (degree_jump only)
  int to = 0;
  double energy_before = 0.0;  // total energy at the last valid reading before the event
  double theta = 0.0;          // location of the smallest boundary midpoint modulus
};

enum class FlowStatus { converged, max_iterations, stalled };
std::string to_string(FlowStatus status);

struct FlowTrace {
  std::vector<TraceRecord> records;
  std::vector<FlowEvent> events;
  FlowStatus status = FlowStatus::max_iterations;
  int iterations = 0;
  double min_boundary_midpoint_modulus = 1.0;
  double stability_bound = 0.0;

  bool has_event(FlowEventKind kind) const;
  // Energy recorded at the first degree jump, if any.
  std::optional<double> escape_energy() const;
};

struct FlowResult {
  ComplexField field;
  FlowTrace trace;
};

// Preconditioned projected gradient descent on the discrete energy.
// Interior nodes move freely; boundary nodes take the unconstrained step
// and are projected back to |u| = 1.
FlowResult run_flow(const ComplexField& initial, Coupling coupling, const FlowConfig& config);

double effective_shift(const FlowConfig& config, const AnnulusSpec& annulus);
// Upper estimate of the largest eigenvalue of the preconditioned Hessian.
double stability_bound(Coupling coupling, double preconditioner_shift);

std::string trace_csv_header();
void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path);

enum class BubbleSign { plus = 1, minus = -1 };

// Multiplies the field by a Moebius factor concentrated at scale
// `concentration` near the boundary point at angle theta0, blended to 1 over
// [rho_c, 2 rho_c] with rho_c = (1-R)/2. Changes the chosen boundary degree
// by the sign.
ComplexField insert_boundary_bubble(const ComplexField& field, Boundary boundary, BubbleSign sign,
                                    double concentration, double theta0 = 0.0);

struct DegreePair {
  int p = 0;  // outer
  int q = 0;  // inner
};

// Constant 1 with |p| outer and |q| inner bubbles at angles 2 pi j / n.
ComplexField assemble_test_field(const AnnulusSpec& annulus, const PolarGrid& grid, DegreePair target,
                                 Coupling coupling);

// e^{i q theta} [(1 - s) + s e^{i (p - q) theta}] with s = t^bias, t = (r-R)/(1-R).
// Degrees (p, q); its p - q zeros sit at s = 1/2.
ComplexField blended_test_field(const PolarGrid& grid, DegreePair target, double bias = 1.0);

// Sign conditions for strict bubbling at a boundary ring, with nu the outward
// normal of the annulus and tau its counterclockwise tangent:
// lower: max of u^d_tau u + u.d_nu u (> 0 permits lowering the degree),
// raise: min of u^d_tau u - u.d_nu u (< 0 permits raising it).
struct SharpBubblingDiagnostic {
  double lower = 0.0;
  double raise = 0.0;
  bool can_lower() const { return lower > 0.0; }
  bool can_raise() const { return raise < 0.0; }
};
SharpBubblingDiagnostic sharp_bubbling_diagnostic(const ComplexField& field, Boundary boundary);

}  // namespace annulus
