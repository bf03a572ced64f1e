#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <ostream>
#include <vector>

#include "singlab/nonlinearity.hpp"
#include "singlab/profile.hpp"

namespace singlab {

/// The truncated strip (0, L) x (0, lambda) with ny vertical intervals graded
/// as x_N(j) = lambda (j/ny)^q.
struct StripDomain {
    double L = 1.0;
    double lambda = 1.0;
    int nx = 16;
    int ny = 32;
    double q = 1.0;

    void validate() const;
};

enum class SideKind { Periodic, DirichletProfile, DirichletCustom };

struct Mesh {
    std::vector<double> x1;
    std::vector<double> xn;
    bool periodic = true;

    int nx() const { return static_cast<int>(x1.size()); }
    int ny() const { return static_cast<int>(xn.size()) - 1; }
};

/// Horizontal nodes are i L / nx (periodic) or i L / (nx - 1) (Dirichlet
/// sides); vertical nodes follow the grading law.
Mesh build_mesh(const StripDomain& domain, bool periodic = true);

/// Boundary data. `bottom` is the regularisation value delta that stands in
/// for u = 0; the solver overwrites it along its delta schedule.
struct BoundaryData {
    double bottom = 0.0;
    std::function<double(double x1)> top;
    SideKind sides = SideKind::Periodic;
    std::shared_ptr<const ProfileTable> side_profile;
    std::function<double(double x1, double xn)> side_custom;

    void validate() const;
};

/// Nodal values on the mesh, stored row by row (row j = height x_N(j)).
class Field {
public:
    Field(StripDomain domain, Mesh mesh);
    Field(StripDomain domain, Mesh mesh, std::vector<double> values);

    const StripDomain& domain() const { return domain_; }
    const Mesh& mesh() const { return mesh_; }
    int nx() const { return mesh_.nx(); }
    int ny() const { return mesh_.ny(); }

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * mesh_.x1.size() + static_cast<std::size_t>(i);
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Whether (i, j) is a solver unknown (not on a Dirichlet boundary).
    bool is_interior(int i, int j) const;

    /// x1,xN,u rows ordered by row then column.
    void write_csv(std::ostream& out) const;

private:
    StripDomain domain_;
    Mesh mesh_;
    std::vector<double> values_;
};

/// Writes the Dirichlet data of `bc` into the boundary nodes of `field`.
void apply_boundary(Field& field, const BoundaryData& bc);

/// R = -Delta_h u - f(u) at interior nodes (0 elsewhere), using the
/// nonuniform three-point vertical difference
/// 2 [(u_below / h- + u_above / h+) / (h- + h+) - u / (h- h+)].
/// Boundary nodes take the values prescribed by `bc`.
/// Throws PositivityError if an interior value is <= 0.
std::vector<double> assemble_residual(const Field& field, const NonlinearitySpec& spec,
                                      const BoundaryData& bc);

/// The same residual on a field whose boundary nodes already hold their data.
std::vector<double> interior_residual(const Field& field, const NonlinearitySpec& spec);

/// max_k |R_k| / (1 + |f(u_k)|) over interior nodes. This is the quantity
/// compared against SolverConfig::newton_tol.
double scaled_residual_norm(const Field& field, std::span<const double> residual,
                            const NonlinearitySpec& spec);

struct SolverConfig {
    double newton_tol = 1e-8;
    int max_iters = 60;
    double damping = 0.5;
    double floor_fraction = 0.1;
    std::vector<double> delta_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    double min_step = 1e-10;

    void validate() const;
};

struct TraceEntry {
    double delta = 0.0;
    int iteration = 0;
    double residual_norm = 0.0;
    double step_length = 0.0;
    double mu = 0.0;
};

struct SolveResult {
    Field field;
    std::vector<TraceEntry> trace;
    double residual_norm = 0.0;
};

/// Writes one JSON object per line: delta, iteration, residual, step, mu.
void write_trace_jsonl(std::span<const TraceEntry> trace, std::ostream& out);

/// Damped Newton with delta-continuation on the bottom data. `initial`
/// defaults to the pure boundary profile clipped below by delta. Throws
/// NonConvergence, PositivityLoss or SingularJacobian.
SolveResult newton_solve(const StripDomain& domain, const NonlinearitySpec& spec,
                         const BoundaryData& bc, const SolverConfig& config,
                         const std::optional<Field>& initial = std::nullopt);

/// sup |u - exact| over nodes with x_N in [lo, hi].
double field_error(const Field& field, const std::function<double(double x1, double xn)>& exact,
                   double lo, double hi);

struct ConvergenceStudy {
    std::vector<int> ny;
    std::vector<double> errors;
    /// log2(e_k / e_{k+1}); empty when the errors are at round-off level.
    std::vector<double> orders;
};

/// Solves on each domain and measures the error against `exact` on the
/// window x_N in [lambda/4, 3 lambda/4].
ConvergenceStudy convergence_study(std::span<const StripDomain> domains,
                                   const NonlinearitySpec& spec, const BoundaryData& bc,
                                   const SolverConfig& config,
                                   const std::function<double(double x1, double xn)>& exact);

}  // namespace singlab
