#include "pite/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pite {

double norm2(const CVec& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

double norm(const CVec& v) { return std::sqrt(norm2(v)); }

GridSpec::GridSpec(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    if (d < 1) throw ConfigError("grid: dimension d must be >= 1");
    if (n < 1) throw ConfigError("grid: qubits per axis n must be >= 1");
    if (n * d > 40) throw ConfigError("grid: d*n too large for a statevector");
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid: domain length L must be > 0");
}

std::vector<RVec> grid_points(const GridSpec& spec) {
    std::vector<RVec> pts(spec.size(), RVec(spec.d));
    const double h = spec.h();
    for (std::size_t j = 0; j < spec.size(); ++j)
        for (int ax = 0; ax < spec.d; ++ax)
            pts[j][ax] = h * static_cast<double>(spec.component(j, ax));
    return pts;
}

SpectralDiagonal kinetic_diagonal(const GridSpec& spec, double a) {
    if (!(a > 0.0)) throw ConfigError("kinetic_diagonal: a must be > 0");
    const double w = 2.0 * kPi / spec.L;
    const double half = static_cast<double>(spec.N() / 2);
    SpectralDiagonal out{RVec(spec.size()), Basis::fourier};
    for (std::size_t j = 0; j < spec.size(); ++j) {
        double s = 0.0;
        for (int ax = 0; ax < spec.d; ++ax) {
            const double k = static_cast<double>(spec.component(j, ax)) - half;
            s += k * k;
        }
        out.values[j] = a * w * w * s;
    }
    return out;
}

SpectralDiagonal advection_diagonal(const GridSpec& spec, double v, int axis) {
    if (axis < 0 || axis >= spec.d) throw ConfigError("advection_diagonal: axis out of range");
    const double w = 2.0 * kPi / spec.L;
    const std::size_t N = spec.N();
    SpectralDiagonal out{RVec(N), Basis::fourier};
    for (std::size_t k = 0; k < N; ++k)
        out.values[k] = v * w * (static_cast<double>(k) - static_cast<double>(N / 2));
    return out;
}

SpectralDiagonal advection_total(const GridSpec& spec, const RVec& v) {
    if (static_cast<int>(v.size()) != spec.d)
        throw ConfigError("advection vector length must equal d");
    SpectralDiagonal out{RVec(spec.size(), 0.0), Basis::fourier};
    for (int ax = 0; ax < spec.d; ++ax) {
        const auto per = advection_diagonal(spec, v[ax], ax);
        for (std::size_t j = 0; j < spec.size(); ++j) out.values[j] += per.values[spec.component(j, ax)];
    }
    return out;
}

PotentialSamples potential_from_table(const GridSpec& spec, const RVec& table) {
    if (table.size() != spec.size())
        throw ConfigError("potential table length " + std::to_string(table.size()) +
                          " does not match grid size " + std::to_string(spec.size()));
    for (double x : table)
        if (!std::isfinite(x)) throw ConfigError("potential: non-finite sample");
    PotentialSamples p;
    p.raw = {table, Basis::position};
    p.V0 = *std::min_element(table.begin(), table.end());
    p.V1 = *std::max_element(table.begin(), table.end());
    p.shifted = {RVec(table.size()), Basis::position};
    for (std::size_t j = 0; j < table.size(); ++j) p.shifted.values[j] = table[j] - p.V0;
    return p;
}

PotentialSamples potential_diagonal(const GridSpec& spec, const PotentialFn& V) {
    const auto pts = grid_points(spec);
    RVec s(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) s[j] = V(pts[j]);
    return potential_from_table(spec, s);
}

PotentialSamples make_potential(const GridSpec& spec, const PotentialSpec& p) {
    // Boundary points of the boxes count as inside; grid points sit exactly on them.
    const double tol = 1e-12 * spec.L;
    if (p.kind == "zero") return potential_diagonal(spec, [](const RVec&) { return 0.0; });
    if (p.kind == "box1d") {
        return potential_diagonal(spec, [&](const RVec& x) {
            for (double xi : x)
                if (std::abs(xi - p.center) > p.halfwidth + tol) return 0.0;
            return p.height;
        });
    }
    if (p.kind == "box2d") {
        const double c = spec.L / 2, hw = spec.L / 4;
        return potential_diagonal(spec, [&](const RVec& x) {
            for (double xi : x)
                if (std::abs(xi - c) > hw + tol) return 0.0;
            return p.height;
        });
    }
    if (p.kind == "gaussian") {
        RVec x0 = p.x0.empty() ? RVec(spec.d, spec.L / 2) : p.x0;
        if (static_cast<int>(x0.size()) != spec.d) throw ConfigError("gaussian potential: x0 length must equal d");
        if (!(p.sigma > 0)) throw ConfigError("gaussian potential: sigma must be > 0");
        return potential_diagonal(spec, [&](const RVec& x) {
            double r2 = 0;
            for (int a = 0; a < spec.d; ++a) r2 += (x[a] - x0[a]) * (x[a] - x0[a]);
            return p.amplitude * std::exp(-r2 / (2 * p.sigma * p.sigma));
        });
    }
    if (p.kind == "table") return potential_from_table(spec, p.table);
    throw ConfigError("unknown potential kind '" + p.kind + "'");
}

HamiltonianParams make_params(const GridSpec& spec, double a, const RVec& v, const PotentialSpec& p,
                              AdvectionConvention conv) {
    if (!(a > 0)) throw ConfigError("diffusion coefficient a must be > 0");
    if (static_cast<int>(v.size()) != spec.d) throw ConfigError("advection vector length must equal d");
    HamiltonianParams hp;
    hp.a = a;
    hp.v = v;
    hp.pot = make_potential(spec, p);
    hp.convention = conv;
    return hp;
}

Eigen::MatrixXcd shifted_dft_matrix(std::size_t N) {
    Eigen::MatrixXcd F(N, N);
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (std::size_t l = 0; l < N; ++l)
        for (std::size_t k = 0; k < N; ++k) {
            // reduce the phase index mod N before scaling to keep it exact
            const long long m = ((static_cast<long long>(k) - static_cast<long long>(N / 2)) *
                                 static_cast<long long>(l)) % static_cast<long long>(N);
            const double ph = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(N);
            F(l, k) = std::polar(s, ph);
        }
    return F;
}

Eigen::MatrixXcd shifted_dft_matrix(const GridSpec& spec) {
    const Eigen::MatrixXcd F1 = shifted_dft_matrix(spec.N());
    Eigen::MatrixXcd F = F1;
    for (int ax = 1; ax < spec.d; ++ax) {
        Eigen::MatrixXcd K(F.rows() * F1.rows(), F.cols() * F1.cols());
        for (Eigen::Index i = 0; i < F.rows(); ++i)
            for (Eigen::Index j = 0; j < F.cols(); ++j)
                K.block(i * F1.rows(), j * F1.cols(), F1.rows(), F1.cols()) = F(i, j) * F1;
        F = std::move(K);
    }
    return F;
}

Eigen::MatrixXcd assemble_dense_hamiltonian(const GridSpec& spec, const HamiltonianParams& params) {
    if (spec.d * spec.n > 14) throw ConfigError("dense Hamiltonian: d*n exceeds 14");
    const auto F = shifted_dft_matrix(spec);
    const auto K = kinetic_diagonal(spec, params.a);
    const auto A = advection_total(spec, params.v);
    Eigen::VectorXcd diag(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j)
        diag[j] = cplx(K.values[j], params.adv_sign() * A.values[j]);
    Eigen::MatrixXcd H = F * diag.asDiagonal() * F.adjoint();
    const auto& V = params.pot.raw.values;
    if (V.size() == spec.size())
        for (std::size_t j = 0; j < spec.size(); ++j) H(j, j) += V[j];
    return H;
}

}  // namespace pite
