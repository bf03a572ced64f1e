#include "singlab/strip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "singlab/banded.hpp"
#include "singlab/errors.hpp"
#include "singlab/io.hpp"

namespace singlab {
namespace {

// Indexing of the unknowns: row-major over interior rows, x fastest.
struct Unknowns {
    int i0 = 0;
    int nux = 0;
    int nuy = 0;

    explicit Unknowns(const Mesh& mesh)
        : i0(mesh.periodic ? 0 : 1),
          nux(mesh.periodic ? mesh.nx() : mesh.nx() - 2),
          nuy(mesh.ny() - 1) {}

    std::size_t count() const { return static_cast<std::size_t>(nux) * static_cast<std::size_t>(nuy); }
    std::size_t operator()(int i, int j) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(nux) +
               static_cast<std::size_t>(i - i0);
    }
};

// Lower barrier used by the line search: the pure profile of the leading
// singular envelope, which the solution tracks near x_N = 0.
double barrier(const NonlinearitySpec& spec, double xn) {
    if (singular_envelope(spec).exponent > 1.0) return profile_asymptote(spec, xn);
    return 0.0;
}

struct Stencil {
    double hx2 = 0.0;
    std::vector<double> below;  // coefficient of u_{j-1}
    std::vector<double> above;  // coefficient of u_{j+1}
    std::vector<double> centre; // vertical part of the diagonal

    explicit Stencil(const Mesh& mesh) {
        const double hx = mesh.x1[1] - mesh.x1[0];
        hx2 = hx * hx;
        const int ny = mesh.ny();
        below.assign(static_cast<std::size_t>(ny + 1), 0.0);
        above = below;
        centre = below;
        for (int j = 1; j < ny; ++j) {
            const double hm = mesh.xn[j] - mesh.xn[j - 1];
            const double hp = mesh.xn[j + 1] - mesh.xn[j];
            below[j] = 2.0 / (hm * (hm + hp));
            above[j] = 2.0 / (hp * (hm + hp));
            centre[j] = 2.0 / (hm * hp);
        }
    }
};

int wrap(int i, int n) { return (i % n + n) % n; }

void residual_into(const Field& field, const NonlinearitySpec& spec, const Stencil& st,
                   std::vector<double>& out) {
    const Mesh& mesh = field.mesh();
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    out.assign(field.values().size(), 0.0);
    const Unknowns unk(mesh);
    for (int j = 1; j < ny; ++j) {
        for (int i = unk.i0; i < unk.i0 + unk.nux; ++i) {
            const double u = field(i, j);
            if (!(u > 0.0) || !std::isfinite(u)) {
                std::ostringstream os;
                os << "non-positive interior value " << u << " at (" << i << ", " << j << ")";
                throw PositivityError(os.str());
            }
            const double ul = field(wrap(i - 1, nx), j);
            const double ur = field(wrap(i + 1, nx), j);
            const double lap = (ul - 2.0 * u + ur) / st.hx2 + st.below[j] * field(i, j - 1) +
                               st.above[j] * field(i, j + 1) - st.centre[j] * u;
            out[field.index(i, j)] = -lap - eval(spec, u);
        }
    }
}

struct Floor {
    std::vector<double> by_row;
};

Floor make_floor(const Mesh& mesh, const NonlinearitySpec& spec, double delta, double fraction) {
    Floor floor;
    floor.by_row.resize(mesh.xn.size());
    for (std::size_t j = 0; j < mesh.xn.size(); ++j) {
        floor.by_row[j] = fraction * (delta + barrier(spec, mesh.xn[j]));
    }
    return floor;
}

// Jacobian of the residual: -Delta_h - diag(f'(u)) + mu I.
bool assemble_jacobian(const Field& field, const NonlinearitySpec& spec, const Stencil& st,
                       double mu, BandedMatrix& J) {
    const Mesh& mesh = field.mesh();
    const Unknowns unk(mesh);
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    J.set_zero();
    bool nonmonotone = false;
    for (int j = 1; j < ny; ++j) {
        for (int i = unk.i0; i < unk.i0 + unk.nux; ++i) {
            const std::size_t row = unk(i, j);
            const double fp = derivative(spec, field(i, j));
            nonmonotone |= fp > 0.0;
            J.at(row, row) += 2.0 / st.hx2 + st.centre[j] - fp + mu;
            for (int di : {-1, 1}) {
                const int ii = mesh.periodic ? wrap(i + di, nx) : i + di;
                if (!field.is_interior(ii, j)) continue;
                J.at(row, unk(ii, j)) += -1.0 / st.hx2;
            }
            if (j - 1 >= 1) J.at(row, unk(i, j - 1)) += -st.below[j];
            if (j + 1 <= ny - 1) J.at(row, unk(i, j + 1)) += -st.above[j];
        }
    }
    return nonmonotone;
}

double max_positive_derivative(const Field& field, const NonlinearitySpec& spec) {
    const Unknowns unk(field.mesh());
    double worst = 0.0;
    for (int j = 1; j < field.ny(); ++j) {
        for (int i = unk.i0; i < unk.i0 + unk.nux; ++i) {
            worst = std::max(worst, derivative(spec, field(i, j)));
        }
    }
    return worst;
}

}  // namespace

void StripDomain::validate() const {
    auto fail = [](const std::string& what) { throw DomainError("invalid strip domain: " + what); };
    if (!(L > 0.0) || !std::isfinite(L)) fail("L must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
    if (nx < 4 || ny < 4) fail("nx and ny must be at least 4");
    if (!(q >= 1.0) || !std::isfinite(q)) fail("grading exponent q must be >= 1");
}

Mesh build_mesh(const StripDomain& domain, bool periodic) {
    domain.validate();
    Mesh mesh;
    mesh.periodic = periodic;
    mesh.x1.resize(static_cast<std::size_t>(domain.nx));
    const double hx = periodic ? domain.L / domain.nx : domain.L / (domain.nx - 1);
    for (int i = 0; i < domain.nx; ++i) mesh.x1[i] = hx * i;
    mesh.xn.resize(static_cast<std::size_t>(domain.ny) + 1);
    for (int j = 0; j <= domain.ny; ++j) {
        mesh.xn[j] = domain.lambda * std::pow(static_cast<double>(j) / domain.ny, domain.q);
    }
    mesh.xn.back() = domain.lambda;
    return mesh;
}

void BoundaryData::validate() const {
    if (!(bottom >= 0.0)) throw DomainError("bottom boundary value must be >= 0");
    if (!top) throw DomainError("top boundary data is missing");
    if (sides == SideKind::DirichletProfile && !side_profile) {
        throw DomainError("DirichletProfile sides need a profile table");
    }
    if (sides == SideKind::DirichletCustom && !side_custom) {
        throw DomainError("DirichletCustom sides need a boundary function");
    }
}

Field::Field(StripDomain domain, Mesh mesh)
    : domain_(std::move(domain)), mesh_(std::move(mesh)), values_(mesh_.x1.size() * mesh_.xn.size(), 0.0) {}

Field::Field(StripDomain domain, Mesh mesh, std::vector<double> values)
    : domain_(std::move(domain)), mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.x1.size() * mesh_.xn.size()) {
        throw DomainError("field value count does not match the mesh");
    }
}

bool Field::is_interior(int i, int j) const {
    if (j <= 0 || j >= ny()) return false;
    if (mesh_.periodic) return i >= 0 && i < nx();
    return i >= 1 && i <= nx() - 2;
}

void Field::write_csv(std::ostream& out) const {
    out << "x1,xN,u\n";
    for (int j = 0; j <= ny(); ++j) {
        for (int i = 0; i < nx(); ++i) {
            out << format_real(mesh_.x1[i]) << ',' << format_real(mesh_.xn[j]) << ','
                << format_real((*this)(i, j)) << '\n';
        }
    }
}

void apply_boundary(Field& field, const BoundaryData& bc) {
    bc.validate();
    const Mesh& mesh = field.mesh();
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    if (!mesh.periodic && bc.sides == SideKind::Periodic) {
        throw DomainError("periodic boundary data on a mesh built for Dirichlet sides");
    }
    if (mesh.periodic && bc.sides != SideKind::Periodic) {
        throw DomainError("Dirichlet side data on a mesh built for periodic sides");
    }
    if (!mesh.periodic) {
        for (int j = 1; j < ny; ++j) {
            for (int i : {0, nx - 1}) {
                const double xn = mesh.xn[j];
                field(i, j) = bc.sides == SideKind::DirichletProfile ? bc.side_profile->value_at(xn)
                                                                     : bc.side_custom(mesh.x1[i], xn);
            }
        }
    }
    for (int i = 0; i < nx; ++i) {
        field(i, ny) = bc.top(mesh.x1[i]);
        field(i, 0) = bc.bottom;
    }
}

std::vector<double> interior_residual(const Field& field, const NonlinearitySpec& spec) {
    std::vector<double> out;
    residual_into(field, spec, Stencil(field.mesh()), out);
    return out;
}

std::vector<double> assemble_residual(const Field& field, const NonlinearitySpec& spec,
                                      const BoundaryData& bc) {
    Field copy = field;
    apply_boundary(copy, bc);
    return interior_residual(copy, spec);
}

double scaled_residual_norm(const Field& field, std::span<const double> residual,
                            const NonlinearitySpec& spec) {
    double worst = 0.0;
    for (int j = 1; j < field.ny(); ++j) {
        for (int i = 0; i < field.nx(); ++i) {
            if (!field.is_interior(i, j)) continue;
            const std::size_t k = field.index(i, j);
            const double scale = 1.0 + std::abs(eval(spec, field(i, j)));
            worst = std::max(worst, std::abs(residual[k]) / scale);
        }
    }
    return worst;
}

void SolverConfig::validate() const {
    auto fail = [](const std::string& what) { throw DomainError("invalid solver config: " + what); };
    if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
    if (max_iters < 1) fail("max_iters must be >= 1");
    if (!(damping > 0.0 && damping < 1.0)) fail("damping must lie in (0, 1)");
    if (!(floor_fraction > 0.0 && floor_fraction < 1.0)) fail("floor_fraction must lie in (0, 1)");
    if (delta_schedule.empty()) fail("delta_schedule is empty");
    for (std::size_t k = 0; k < delta_schedule.size(); ++k) {
        if (!(delta_schedule[k] >= 0.0)) fail("delta_schedule entries must be >= 0");
        if (k > 0 && !(delta_schedule[k] < delta_schedule[k - 1])) {
            fail("delta_schedule must be strictly decreasing");
        }
    }
    if (!(min_step > 0.0 && min_step < 1.0)) fail("min_step must lie in (0, 1)");
}

void write_trace_jsonl(std::span<const TraceEntry> trace, std::ostream& out) {
    for (const TraceEntry& e : trace) {
        out << "{\"delta\":" << format_real(e.delta) << ",\"iteration\":" << e.iteration
            << ",\"residual\":" << format_real(e.residual_norm)
            << ",\"step\":" << format_real(e.step_length) << ",\"mu\":" << format_real(e.mu)
            << "}\n";
    }
}

SolveResult newton_solve(const StripDomain& domain, const NonlinearitySpec& spec,
                         const BoundaryData& bc, const SolverConfig& config,
                         const std::optional<Field>& initial) {
    domain.validate();
    spec.validate();
    config.validate();
    bc.validate();

    const bool periodic = bc.sides == SideKind::Periodic;
    Mesh mesh = build_mesh(domain, periodic);
    const Stencil stencil(mesh);
    const Unknowns unk(mesh);

    BoundaryData data = bc;
    data.bottom = config.delta_schedule.front();

    Field u = initial ? *initial : Field(domain, mesh);
    if (initial) {
        if (initial->values().size() != u.values().size() || initial->mesh().periodic != periodic) {
            throw DomainError("initial guess does not match the strip mesh");
        }
    } else {
        for (int j = 0; j <= mesh.ny(); ++j) {
            const double guess = std::max(barrier(spec, mesh.xn[j]), data.bottom);
            for (int i = 0; i < mesh.nx(); ++i) u(i, j) = guess;
        }
    }
    apply_boundary(u, data);

    SolveResult result{u, {}, 0.0};
    BandedMatrix J(unk.count(), static_cast<std::size_t>(unk.nux), static_cast<std::size_t>(unk.nux));
    std::vector<double> residual, trial_residual, step(unk.count());

    for (const double delta : config.delta_schedule) {
        data.bottom = delta;
        apply_boundary(u, data);
        const Floor floor = make_floor(mesh, spec, delta, config.floor_fraction);
        residual_into(u, spec, stencil, residual);
        double norm = scaled_residual_norm(u, residual, spec);
        bool converged = false;

        for (int iter = 0; iter <= config.max_iters; ++iter) {
            if (norm <= config.newton_tol) {
                result.trace.push_back({delta, iter, norm, 0.0, 0.0});
                converged = true;
                break;
            }
            if (iter == config.max_iters) break;

            double mu = 0.0;
            bool accepted = false;
            bool floor_blocked = false;
            double alpha = 1.0;
            for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
                const bool nonmonotone = assemble_jacobian(u, spec, stencil, mu, J);
                J.factorize();
                for (int j = 1; j < mesh.ny(); ++j) {
                    for (int i = unk.i0; i < unk.i0 + unk.nux; ++i) {
                        step[unk(i, j)] = -residual[u.index(i, j)];
                    }
                }
                J.solve_in_place(step);

                floor_blocked = false;
                alpha = 1.0;
                Field trial = u;
                while (alpha >= config.min_step) {
                    bool above_floor = true;
                    for (int j = 1; j < mesh.ny() && above_floor; ++j) {
                        for (int i = unk.i0; i < unk.i0 + unk.nux; ++i) {
                            const double value = u(i, j) + alpha * step[unk(i, j)];
                            if (!(value > floor.by_row[j]) || !std::isfinite(value)) {
                                above_floor = false;
                                break;
                            }
                            trial(i, j) = value;
                        }
                    }
                    if (above_floor) {
                        residual_into(trial, spec, stencil, trial_residual);
                        const double trial_norm = scaled_residual_norm(trial, trial_residual, spec);
                        if (trial_norm < norm) {
                            u = std::move(trial);
                            residual.swap(trial_residual);
                            norm = trial_norm;
                            accepted = true;
                            break;
                        }
                        floor_blocked = false;
                    } else {
                        floor_blocked = true;
                    }
                    alpha *= config.damping;
                }
                if (accepted) break;
                if (!nonmonotone) break;
                // Levenberg shift for non-monotone f, grown on each failure.
                mu = mu == 0.0 ? std::max(1.0, max_positive_derivative(u, spec)) : 10.0 * mu;
            }
            if (!accepted) {
                std::ostringstream os;
                os << "line search failed at delta = " << delta << ", iteration " << iter
                   << ", residual " << norm;
                if (floor_blocked) throw PositivityLoss(os.str());
                throw NonConvergence(os.str());
            }
            result.trace.push_back({delta, iter + 1, norm, alpha, mu});
        }
        if (!converged) {
            std::ostringstream os;
            os << "Newton iteration budget (" << config.max_iters << ") exhausted at delta = "
               << delta << ", residual " << norm;
            throw NonConvergence(os.str());
        }
        result.residual_norm = norm;
    }
    result.field = std::move(u);
    return result;
}

double field_error(const Field& field, const std::function<double(double, double)>& exact,
                   double lo, double hi) {
    const Mesh& mesh = field.mesh();
    double worst = 0.0;
    for (int j = 0; j <= mesh.ny(); ++j) {
        if (mesh.xn[j] < lo || mesh.xn[j] > hi) continue;
        for (int i = 0; i < mesh.nx(); ++i) {
            worst = std::max(worst, std::abs(field(i, j) - exact(mesh.x1[i], mesh.xn[j])));
        }
    }
    return worst;
}

ConvergenceStudy convergence_study(std::span<const StripDomain> domains,
                                   const NonlinearitySpec& spec, const BoundaryData& bc,
                                   const SolverConfig& config,
                                   const std::function<double(double, double)>& exact) {
    ConvergenceStudy study;
    for (const StripDomain& d : domains) {
        const SolveResult solved = newton_solve(d, spec, bc, config);
        study.ny.push_back(d.ny);
        study.errors.push_back(field_error(solved.field, exact, 0.25 * d.lambda, 0.75 * d.lambda));
    }
    constexpr double kRoundoff = 1e-12;
    const bool roundoff = std::all_of(study.errors.begin(), study.errors.end(),
                                      [](double e) { return e <= kRoundoff; });
    if (!roundoff) {
        for (std::size_t k = 0; k + 1 < study.errors.size(); ++k) {
            study.orders.push_back(std::log2(study.errors[k] / study.errors[k + 1]));
        }
    }
    return study;
}

}  // namespace singlab
