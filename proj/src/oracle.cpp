#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "subfk/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace subfk {

GridSpec::GridSpec(int d_, int n_, double L_) : d(d_), n(n_), L(L_)
{
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("grid dimension must be 1..3");
    if (n < 3) throw std::invalid_argument("grid needs n_per_axis >= 3");
    if (!(L > 0.0)) throw std::invalid_argument("grid half-width must be positive");
}

size_t GridSpec::sites() const
{
    size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<size_t>(n);
    return s;
}

double GridSpec::cell_volume() const
{
    return std::pow(spacing(), d);
}

Vec GridSpec::point(size_t site) const
{
    Vec x{0, 0, 0};
    const double h = spacing();
    for (int i = 0; i < d; ++i) {
        x[i] = -L + h * static_cast<double>(site % n);
        site /= n;
    }
    return x;
}

HermitianEigen eigh(const Eigen::MatrixXcd& m)
{
    const lapack_int n = static_cast<lapack_int>(m.rows());
    HermitianEigen out;
    out.vectors = m;
    out.values.resize(n);
    if (n == 0) return out;
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data());
    if (info != 0) throw Error("zheevd failed with info " + std::to_string(info));
    return out;
}

double hermiticity_defect(const Eigen::MatrixXcd& m)
{
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

// 1-D wavenumbers pi m / L for the n Fourier modes, m in [-n/2, n/2).
std::vector<double> wavenumbers(const GridSpec& g)
{
    std::vector<double> k(g.n);
    for (int j = 0; j < g.n; ++j) {
        int m = j < (g.n + 1) / 2 ? j : j - g.n;
        k[j] = std::numbers::pi * m / g.L;
    }
    return k;
}

// 1-D spectral matrices for (1/2) p^2 (full symbol) and p (Nyquist mode dropped).
void spectral_1d(const GridSpec& g, Eigen::MatrixXd& half_p2, Eigen::MatrixXcd& p1)
{
    const int n = g.n;
    const double h = g.spacing();
    auto k = wavenumbers(g);
    const bool even = n % 2 == 0;
    half_p2.setZero(n, n);
    p1.setZero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dx = (i - j) * h;
            double s2 = 0.0, s1 = 0.0;
            for (int m = 0; m < n; ++m) {
                s2 += 0.5 * k[m] * k[m] * std::cos(k[m] * dx);
                if (!(even && m == n / 2)) s1 += k[m] * std::sin(k[m] * dx);
            }
            half_p2(i, j) = s2 / n;
            p1(i, j) = cplx(0.0, s1 / n);
        }
}

// Lifts a 1-D operator on axis mu to the full site space.
Eigen::MatrixXcd lift(const GridSpec& g, const Eigen::MatrixXcd& m1, int mu)
{
    const size_t N = g.sites();
    size_t stride = 1;
    for (int i = 0; i < mu; ++i) stride *= g.n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (size_t s = 0; s < N; ++s) {
        const size_t im = (s / stride) % g.n;
        const size_t base = s - im * stride;
        for (int j = 0; j < g.n; ++j) out(s, base + j * stride) = m1(im, j);
    }
    return out;
}

Eigen::MatrixXcd kinetic(const GridSpec& g, const FieldSpec& field, KineticScheme scheme)
{
    const size_t N = g.sites();
    if (N > kDenseBudget) throw std::invalid_argument("grid exceeds the dense eigensolver budget");
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);
    const double h = g.spacing();
    if (scheme == KineticScheme::Spectral) {
        Eigen::MatrixXd t2;
        Eigen::MatrixXcd p1;
        spectral_1d(g, t2, p1);
        Eigen::MatrixXcd t2c = t2.cast<cplx>();
        for (int mu = 0; mu < g.d; ++mu) {
            H += lift(g, t2c, mu);
            if (field.is_zero) continue;
            Eigen::MatrixXcd P = lift(g, p1, mu);
            Eigen::VectorXd A(N);
            for (size_t s = 0; s < N; ++s) A(s) = field.a(g.point(s))[mu];
            // (1/2)(P - A)^2 = (1/2)P^2 - (1/2)(P A + A P) + (1/2) A^2
            Eigen::MatrixXcd PA = P * A.cast<cplx>().asDiagonal();
            H -= 0.5 * (PA + PA.adjoint());
            for (size_t s = 0; s < N; ++s) H(s, s) += 0.5 * A(s) * A(s);
        }
    } else {
        size_t stride = 1;
        for (int mu = 0; mu < g.d; ++mu) {
            for (size_t s = 0; s < N; ++s) {
                const size_t im = (s / stride) % g.n;
                const size_t nb = s - im * stride + ((im + 1) % g.n) * stride;
                Vec mid = g.point(s);
                mid[mu] += 0.5 * h;
                double theta = field.is_zero ? 0.0 : h * field.a(mid)[mu];
                cplx hop = -0.5 * std::polar(1.0, -theta) / (h * h);
                H(s, s) += 1.0 / (h * h);
                H(s, nb) += hop;
                H(nb, s) += std::conj(hop);
            }
            stride *= g.n;
        }
    }
    return H;
}

}  // namespace

GridOperator discretize_h(const GridSpec& grid, const FieldSpec& field, KineticScheme scheme)
{
    GridOperator op;
    op.grid = grid;
    op.matrix = kinetic(grid, field, scheme);
    // symmetrize away rounding
    op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();
    return op;
}

GridOperator discretize_spin(const GridSpec& grid, const SpinCoupling& c, const FieldSpec& field,
                             KineticScheme scheme)
{
    const int p = c.p;
    const size_t N = grid.sites();
    if (N * p > kDenseBudget) throw std::invalid_argument("spin grid exceeds the dense eigensolver budget");
    Eigen::MatrixXcd h = kinetic(grid, field, scheme);
    GridOperator op;
    op.grid = grid;
    op.spin_p = p;
    op.matrix = Eigen::MatrixXcd::Zero(N * p, N * p);
    SpinConfig sc(p);
    for (int a = 1; a <= p; ++a) {
        op.matrix.block((a - 1) * N, (a - 1) * N, N, N) = h;
        for (size_t s = 0; s < N; ++s) {
            Vec x = grid.point(s);
            const size_t row = (a - 1) * N + s;
            if (c.U) op.matrix(row, row) += c.U(x, a);
            for (int beta = 1; beta < p; ++beta) {
                const size_t col = (sc.add(a, beta) - 1) * N + s;
                op.matrix(row, col) += c.offdiag(beta, x, a);
            }
        }
    }
    const double defect = hermiticity_defect(op.matrix);
    const double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
    if (defect > 1e-10 * scale)
        throw Error("spin operator is not Hermitian (defect " + std::to_string(defect) +
                    "); the off-diagonal couplings must pair as U_{p-beta}(alpha+beta) = conj U_beta(alpha)");
    op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();
    return op;
}

GridOperator psi_of_operator(const GridOperator& op, const BernsteinFunction& psi, ShiftMode mode,
                             double fixed_shift)
{
    HermitianEigen e = eigh(op.matrix);
    double shift = 0.0;
    if (mode == ShiftMode::InfSpecIfNegative && e.values(0) < 0.0) shift = e.values(0);
    if (mode == ShiftMode::Fixed) shift = fixed_shift;
    Eigen::VectorXd f(e.values.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        double lam = e.values(i) - shift;
        if (lam < -1e-10)
            throw AssumptionError("negative spectrum (" + std::to_string(lam) +
                                  ") under Psi; shift by inf spec before applying Psi");
        f(i) = lam <= 0.0 ? 0.0 : psi(lam);
    }
    GridOperator out;
    out.grid = op.grid;
    out.spin_p = op.spin_p;
    out.shift = op.shift + shift;
    out.matrix = e.vectors * f.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
    return out;
}

Eigen::VectorXd sample_potential(const GridSpec& grid, const ScalarField& V, int spin_p)
{
    const size_t N = grid.sites();
    Eigen::VectorXd v(N * spin_p);
    for (size_t s = 0; s < N; ++s) {
        double val = V(grid.point(s));
        for (int a = 0; a < spin_p; ++a) v(a * N + s) = val;
    }
    return v;
}

Eigen::VectorXcd sample_function(const GridSpec& grid, const std::function<cplx(const Vec&)>& f)
{
    const size_t N = grid.sites();
    Eigen::VectorXcd v(N);
    for (size_t s = 0; s < N; ++s) v(s) = f(grid.point(s));
    return v;
}

Eigen::VectorXcd sample_spin_function(const GridSpec& grid, int p, const std::function<cplx(const Vec&, int)>& f)
{
    const size_t N = grid.sites();
    Eigen::VectorXcd v(N * p);
    for (int a = 1; a <= p; ++a)
        for (size_t s = 0; s < N; ++s) v((a - 1) * N + s) = f(grid.point(s), a);
    return v;
}

GridSemigroup::GridSemigroup(const GridOperator& op, const Eigen::VectorXd& V) : grid_(op.grid)
{
    if (V.size() == 0) {
        eig_ = eigh(op.matrix);
    } else {
        if (V.size() != op.dim()) throw std::invalid_argument("potential size does not match the operator");
        Eigen::MatrixXcd m = op.matrix;
        m.diagonal() += V.cast<cplx>();
        eig_ = eigh(m);
    }
}

Eigen::MatrixXcd GridSemigroup::matrix(double t) const
{
    if (t < 0.0) throw std::invalid_argument("semigroup time must be >= 0");
    Eigen::VectorXd w = (-t * eig_.values.array()).exp();
    return eig_.vectors * w.cast<cplx>().asDiagonal() * eig_.vectors.adjoint();
}

Eigen::VectorXcd GridSemigroup::apply(const Eigen::VectorXcd& v, double t) const
{
    if (t < 0.0) throw std::invalid_argument("semigroup time must be >= 0");
    Eigen::VectorXcd c = eig_.vectors.adjoint() * v;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-t * eig_.values(i));
    return eig_.vectors * c;
}

cplx GridSemigroup::matrix_element(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g, double t) const
{
    return grid_inner(grid_, f, apply(g, t));
}

Eigen::MatrixXcd semigroup_matrix(const GridOperator& op, const Eigen::VectorXd& V, double t)
{
    return GridSemigroup(op, V).matrix(t);
}

double ground_energy(const GridOperator& op, const Eigen::VectorXd& V)
{
    return GridSemigroup(op, V).ground_energy();
}

cplx grid_inner(const GridSpec& grid, const Eigen::VectorXcd& f, const Eigen::VectorXcd& g)
{
    return f.dot(g) * grid.cell_volume();
}

}  // namespace subfk
