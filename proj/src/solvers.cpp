#include "kinf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kinf {

namespace {

double relative(double numerator, double denominator) { return denominator > 0.0 ? numerator / denominator : numerator; }

void require_same_space(const MeasureSpace& a, const MeasureSpace& b, const char* where)
{
    if (!(a == b)) throw Error(ErrorKind::SpaceMismatch, std::string(where) + ": grids differ");
}

}  // namespace

GridFunction forward_third_kind(const ThirdKindProblem& problem, const GridFunction& phi)
{
    require_same_space(problem.coefficient.space, phi.space, "forward_third_kind");
    require_same_space(problem.kernel.space, phi.space, "forward_third_kind");
    const Vector hphi = problem.coefficient.values.cwiseProduct(phi.values);
    const Vector kphi = problem.kernel.apply(phi).values;
    return GridFunction(phi.space, hphi - problem.lambda * kphi);
}

Matrix KernelPencil::system(Complex lambda) const
{
    return alpha * Matrix::Identity(size(), size()) + a0.entries - lambda * a.entries;
}

BilinearKernel KernelPencil::kernel(Complex lambda) const { return synthesize(CoefficientMatrix{pencil(lambda)}, basis); }

Reduction reduce(const ThirdKindProblem& problem, Complex alpha, const KorotkovSequence& sequence,
                 const UnitarySurrogate& unitary)
{
    const MeasureSpace& space = unitary.space();
    require_same_space(sequence.space, space, "reduce");
    require_same_space(problem.coefficient.space, space, "reduce");
    require_same_space(problem.kernel.space, space, "reduce");
    require_same_space(problem.rhs.space, space, "reduce");

    const GridFunction shifted(space, problem.coefficient.values.array() - alpha);
    CoefficientMatrix a0 = matrix_elements(GridOperator::multiplication(shifted), unitary);
    CoefficientMatrix a = matrix_elements(GridOperator::integral(problem.kernel), unitary);
    return Reduction{KernelPencil{alpha, std::move(a0), std::move(a), unitary.basis()}, unitary.forward(problem.rhs)};
}

SecondKindSolution solve_second_kind(const KernelPencil& pencil, Complex lambda, const Vector& g)
{
    if (pencil.alpha == Complex(0.0)) {
        throw Error(ErrorKind::InvalidArgument, "second-kind solve needs alpha != 0; use the first-kind route");
    }
    if (g.size() != pencil.size()) throw Error(ErrorKind::InvalidArgument, "right side and pencil sizes differ");
    const Matrix s = pencil.system(lambda);
    Eigen::PartialPivLU<Matrix> lu(s);
    const double rcond = lu.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition <= kNearSingularCondition)) {
        throw Error(ErrorKind::NearSingular,
                    "system is near singular (condition estimate " + std::to_string(condition) +
                        "); lambda is close to a characteristic value",
                    condition);
    }
    Vector c = lu.solve(g);
    // One step of iterative refinement.
    c += lu.solve(Vector(g - s * c));
    const double residual = relative((s * c - g).norm(), g.norm());
    return SecondKindSolution{std::move(c), residual, condition};
}

FirstKindProblem make_first_kind(const KernelPencil& pencil, const Multiplier& multiplier, const Vector& g,
                                 std::optional<std::size_t> quad_nodes)
{
    if (pencil.alpha != Complex(0.0)) {
        throw Error(ErrorKind::AlphaNotZero, "first-kind reduction needs alpha = 0");
    }
    if (g.size() != pencil.size()) throw Error(ErrorKind::InvalidArgument, "right side and pencil sizes differ");
    const std::size_t nodes = quad_nodes.value_or(default_quadrature_nodes(pencil.basis.size()));
    RealMatrix m = multiplier_matrix(multiplier, pencil.basis, nodes);
    Vector w = m.cast<Complex>() * g;
    BilinearKernel gamma0 = scale_by_multiplier(synthesize(pencil.a0, pencil.basis), multiplier, m);
    BilinearKernel gamma = scale_by_multiplier(synthesize(pencil.a, pencil.basis), multiplier, m);
    return FirstKindProblem{pencil, multiplier, std::move(m), std::move(w), std::move(gamma0), std::move(gamma)};
}

FirstKindSolution solve_first_kind(const FirstKindProblem& problem, Complex lambda, double cutoff)
{
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw Error(ErrorKind::InvalidArgument, "cutoff must lie in (0, 1)");
    const Matrix system = problem.m.cast<Complex>() * problem.pencil.pencil(lambda);
    Eigen::BDCSVD<Matrix> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sigma = svd.singularValues();
    const double largest = sigma.size() > 0 ? sigma[0] : 0.0;
    if (!(largest > 0.0)) throw Error(ErrorKind::DegenerateSystem, "first-kind system is zero");
    const double threshold = cutoff * largest;
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma[rank] >= threshold) ++rank;
    if (rank == 0) throw Error(ErrorKind::DegenerateSystem, "every singular value falls below the cutoff");

    const Vector projected = svd.matrixU().adjoint() * problem.w;
    Vector scaled = projected.head(rank).cwiseQuotient(sigma.head(rank).cast<Complex>());
    Vector c = svd.matrixV().leftCols(rank) * scaled;
    // The system is square, so U is unitary and ||w||^2 = ||U* w||^2.
    const double total = projected.squaredNorm();
    const double dropped = projected.tail(sigma.size() - rank).squaredNorm();
    const double discarded = total > 0.0 ? dropped / total : 0.0;
    return FirstKindSolution{std::move(c), discarded, rank};
}

HilbertSchmidtBound hilbert_schmidt_bound(const BilinearKernel& plain, const Multiplier& m, const ProbeGrid& probe)
{
    if (plain.multiplier) throw Error(ErrorKind::InvalidArgument, "hilbert_schmidt_bound takes the kernel before scaling");
    const RealMatrix mm = multiplier_matrix(m, plain.basis, default_quadrature_nodes(plain.basis.size()));
    const BilinearKernel scaled = scale_by_multiplier(plain, m, mm);
    HilbertSchmidtBound out{};
    out.hs_norm = hs_norm(scaled);
    out.hs_norm_pointwise = hs_norm_pointwise(scaled);
    out.carleman_sup = carleman_sup(plain, probe, CarlemanSide::Row, 0);
    out.multiplier_norm = m.l2_norm();
    out.slack = 0.5 * probe.spacing() * carleman_sup(plain, probe, CarlemanSide::Row, 1) * out.multiplier_norm;
    return out;
}

std::pair<double, double> adjoint_column_decay(const Matrix& multiplied)
{
    const Eigen::Index n = multiplied.rows();
    const Eigen::Index quarter = std::max<Eigen::Index>(n / 4, 1);
    // Column n of (M A)* is (M A)* u_n; its norm is the norm of row n of M A.
    const RealVector norms = multiplied.rowwise().norm();
    return {norms.head(quarter).maxCoeff(), norms.tail(quarter).maxCoeff()};
}

std::pair<double, double> column_decay(const Matrix& multiplied)
{
    return adjoint_column_decay(multiplied.adjoint());
}

bool EquivalenceReport::passed() const
{
    bool ok = passage_residual <= tolerance && round_trip_error <= tolerance;
    if (first_kind) {
        ok = ok && first_kind->identity_residual <= tolerance && first_kind->hs.holds() &&
             first_kind->decay_last_quarter < first_kind->decay_first_quarter;
    }
    return ok;
}

nlohmann::json EquivalenceReport::to_json() const
{
    nlohmann::json j = {
        {"passage_residual", passage_residual},
        {"round_trip_error", round_trip_error},
        {"condition", condition ? nlohmann::json(*condition) : nlohmann::json(nullptr)},
        {"hs_norm", hs_norm},
        {"carleman_sup", carleman_sup},
        {"tail_sup", tail_sup},
        {"discarded_energy", first_kind ? nlohmann::json(first_kind->discarded_energy) : nlohmann::json(nullptr)},
        {"projected", projected},
        {"tolerance", tolerance},
        {"passed", passed()},
    };
    if (first_kind) {
        const auto& f = *first_kind;
        j["first_kind"] = {
            {"identity_residual", f.identity_residual},
            {"hs_norm", f.hs.hs_norm},
            {"hs_norm_pointwise", f.hs.hs_norm_pointwise},
            {"carleman_sup", f.hs.carleman_sup},
            {"multiplier_norm", f.hs.multiplier_norm},
            {"hs_bound", f.hs.bound()},
            {"bound_slack", f.hs.slack},
            {"bound_holds", f.hs.holds()},
            {"discarded_energy", f.discarded_energy},
            {"rank", f.rank},
            {"truncated", f.truncated()},
            {"recovery_error", f.recovery_error},
            {"decay_first_quarter", f.decay_first_quarter},
            {"decay_last_quarter", f.decay_last_quarter},
            {"column_first_quarter", f.column_first_quarter},
            {"column_last_quarter", f.column_last_quarter},
        };
    }
    return j;
}

EquivalenceReport verify_equivalence(const ThirdKindProblem& problem, Complex alpha, const KorotkovSequence& sequence,
                                     const UnitarySurrogate& unitary, const GridFunction& phi,
                                     const VerifyOptions& options)
{
    ThirdKindProblem manufactured = problem;
    manufactured.rhs = forward_third_kind(problem, phi);
    const Reduction red = reduce(manufactured, alpha, sequence, unitary);
    const Vector f = unitary.forward(phi);
    const Complex lambda = problem.lambda;

    EquivalenceReport report{};
    report.tolerance = options.tolerance;
    report.projected = unitary.projected();
    report.passage_residual = relative((red.pencil.system(lambda) * f - red.g).norm(), red.g.norm());
    report.round_trip_error = relative((unitary.inverse(f).values - phi.values).norm(), phi.values.norm());

    const BilinearKernel kernel = red.pencil.kernel(lambda);
    report.hs_norm = hs_norm(kernel);
    report.carleman_sup = carleman_sup(kernel, options.probe);
    report.tail_sup = tail_sup(kernel, m_factorize(kernel.coefficients), options.probe);

    if (alpha != Complex(0.0)) {
        try {
            report.condition = solve_second_kind(red.pencil, lambda, red.g).condition;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearSingular) throw;
            report.condition = e.value();
        }
        return report;
    }

    const FirstKindProblem fk = make_first_kind(red.pencil, options.multiplier, red.g);
    const Matrix multiplied = fk.m.cast<Complex>() * red.pencil.pencil(lambda);
    FirstKindReport first{};
    first.size = red.pencil.size();
    first.identity_residual = relative((multiplied * f - fk.w).norm(), fk.w.norm());
    first.hs = hilbert_schmidt_bound(kernel, options.multiplier, options.probe);
    try {
        const FirstKindSolution sol = solve_first_kind(fk, lambda, options.cutoff);
        first.discarded_energy = sol.discarded_energy;
        first.rank = sol.rank;
        first.recovery_error = relative((sol.c - f).norm(), f.norm());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateSystem) throw;
        first.discarded_energy = 1.0;
        first.rank = 0;
        first.recovery_error = std::numeric_limits<double>::infinity();
    }
    const auto [head, tail] = adjoint_column_decay(multiplied);
    first.decay_first_quarter = head;
    first.decay_last_quarter = tail;
    const auto [col_head, col_tail] = column_decay(multiplied);
    first.column_first_quarter = col_head;
    first.column_last_quarter = col_tail;
    report.first_kind = first;
    return report;
}

}  // namespace kinf
