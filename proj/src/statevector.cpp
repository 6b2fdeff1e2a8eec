#include "pite/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

namespace pite {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

State::State(Layout l) : layout(std::move(l)), amps(layout.stored_size()) {
    amps[0] = 1.0;
}

double State::success_prob() const { return std::exp(log_prob); }
double State::log10_success_prob() const { return log_prob / std::log(10.0); }

State make_state(const GridSpec& grid, int n_species, int n_anc) {
    if (n_species < 0 || n_species > 1) throw ConfigError("only zero or one species qubit is supported");
    if (n_anc < 0 || n_anc > 1) throw ConfigError("n_anc must be 0 or 1");
    return State(Layout{n_anc, n_species, grid});
}

void set_statevector(State& st, const CVec& amps) {
    const std::size_t ns = st.layout.stored_size();
    CVec a;
    if (amps.size() == ns) {
        a = amps;
    } else if (amps.size() == st.layout.full_size()) {
        for (std::size_t j = ns; j < amps.size(); ++j)
            if (amps[j] != cplx(0.0)) throw ConfigError("set_statevector: ancilla must be |0>");
        a.assign(amps.begin(), amps.begin() + static_cast<std::ptrdiff_t>(ns));
    } else {
        throw ConfigError("set_statevector: length " + std::to_string(amps.size()) + " does not match register (" +
                          std::to_string(ns) + ")");
    }
    const double nrm = norm(a);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConfigError("set_statevector: zero or non-finite vector");
    for (auto& z : a) z /= nrm;
    st.amps = std::move(a);
    st.log_prob = 0.0;
    st.scale = nrm;
}

void apply_diagonal_phase(State& st, const RVec& theta, double sign, Basis required) {
    if (st.basis != required) throw ConfigError("apply_diagonal_phase: basis mismatch");
    const std::size_t ns = st.amps.size();
    if (theta.size() != ns && ns % theta.size() != 0)
        throw ConfigError("apply_diagonal_phase: diagonal length mismatch");
    const std::size_t m = theta.size();
    for (std::size_t j = 0; j < ns; ++j) st.amps[j] *= std::polar(1.0, -sign * theta[j % m]);
}

namespace {

struct Twiddles {
    CVec w;  // exp(-2 pi i k / N), k < N/2
};

const Twiddles& twiddles(std::size_t N) {
    thread_local std::map<std::size_t, Twiddles> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    Twiddles t;
    t.w.resize(N / 2);
    for (std::size_t k = 0; k < N / 2; ++k)
        t.w[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(N));
    return cache.emplace(N, std::move(t)).first->second;
}

}  // namespace

void fft_radix2(cplx* a, std::size_t N, int sign) {
    if (N <= 1) return;
    for (std::size_t i = 1, j = 0; i < N; ++i) {
        std::size_t bit = N >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& tw = twiddles(N).w;
    for (std::size_t len = 2; len <= N; len <<= 1) {
        const std::size_t step = N / len;
        for (std::size_t i = 0; i < N; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx w = tw[k * step];
                if (sign > 0) w = std::conj(w);
                const cplx u = a[i + k];
                const cplx t = a[i + k + len / 2] * w;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
            }
        }
    }
}

namespace {

template <class LineOp>
void for_each_line(CVec& v, const GridSpec& g, int axis, LineOp&& op) {
    const std::size_t N = g.N(), s = g.stride(axis);
    const std::size_t block = g.size();
    if (v.size() % block != 0) throw ConfigError("shifted QFT: vector length is not a multiple of the grid size");
    CVec line(N);
    for (std::size_t base0 = 0; base0 < v.size(); base0 += block)
        for (std::size_t outer = 0; outer < block; outer += N * s)
            for (std::size_t inner = 0; inner < s; ++inner) {
                const std::size_t base = base0 + outer + inner;
                for (std::size_t l = 0; l < N; ++l) line[l] = v[base + l * s];
                op(line);
                for (std::size_t l = 0; l < N; ++l) v[base + l * s] = line[l];
            }
}

}  // namespace

void shifted_qft_blocks(CVec& v, const GridSpec& g, QftDirection dir) {
    const std::size_t N = g.N();
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (int ax = 0; ax < g.d; ++ax) {
        for_each_line(v, g, ax, [&](CVec& line) {
            if (dir == QftDirection::forward) {
                // F[l,k] = N^{-1/2} (-1)^l exp(+2 pi i k l / N)
                fft_radix2(line.data(), N, +1);
                for (std::size_t l = 0; l < N; ++l) line[l] *= (l & 1) ? -s : s;
            } else {
                for (std::size_t l = 0; l < N; ++l) line[l] *= (l & 1) ? -s : s;
                fft_radix2(line.data(), N, -1);
            }
        });
    }
}

void fft_axes(CVec& v, const GridSpec& g, int sign) {
    for (int ax = 0; ax < g.d; ++ax)
        for_each_line(v, g, ax, [&](CVec& line) { fft_radix2(line.data(), g.N(), sign); });
}

void shifted_qft_direct(CVec& v, const GridSpec& g, QftDirection dir) {
    const std::size_t N = g.N();
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    const double sg = dir == QftDirection::forward ? 1.0 : -1.0;
    for (int ax = 0; ax < g.d; ++ax) {
        for_each_line(v, g, ax, [&](CVec& line) {
            CVec out(N);
            for (std::size_t r = 0; r < N; ++r) {
                cplx acc = 0.0;
                for (std::size_t c = 0; c < N; ++c) {
                    // forward: row = l, col = k; inverse: row = k, col = l
                    const std::size_t l = dir == QftDirection::forward ? r : c;
                    const std::size_t k = dir == QftDirection::forward ? c : r;
                    const double ph = 2.0 * kPi / static_cast<double>(N) *
                                      (static_cast<double>(k) - static_cast<double>(N / 2)) * static_cast<double>(l);
                    acc += std::polar(s, sg * ph) * line[c];
                }
                out[r] = acc;
            }
            line = out;
        });
    }
}

void apply_shifted_qft(State& st, QftDirection dir) {
    const Basis need = dir == QftDirection::forward ? Basis::fourier : Basis::position;
    if (st.basis != need)
        throw ConfigError(std::string("apply_shifted_qft: state is in ") + to_string(st.basis) + " basis");
    shifted_qft_blocks(st.amps, st.layout.grid, dir);
    st.basis = dir == QftDirection::forward ? Basis::position : Basis::fourier;
}

Mat2 gate_matrix(Gate g, double phi) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    switch (g) {
        case Gate::H: return {r, r, r, -r};
        case Gate::W: return {r, i * r, i * r, r};
        case Gate::Wdag: return {r, -i * r, -i * r, r};
        case Gate::Q: return {cplx(r, r), 0.0, 0.0, cplx(-r, r)};
        case Gate::Qdag: return {cplx(r, -r), 0.0, 0.0, cplx(-r, -r)};
        case Gate::Rz: return {std::polar(1.0, -phi / 2), 0.0, 0.0, std::polar(1.0, phi / 2)};
    }
    throw ConfigError("unknown gate");
}

void apply_gate_raw(CVec& v, const Mat2& m, int bit) {
    const std::size_t mask = std::size_t{1} << bit;
    if (mask >= v.size() || bit < 0) throw ConfigError("gate: qubit index out of range");
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j & mask) continue;
        const cplx a0 = v[j], a1 = v[j | mask];
        v[j] = m[0] * a0 + m[1] * a1;
        v[j | mask] = m[2] * a0 + m[3] * a1;
    }
}

void apply_single_qubit_gate(State& st, Gate g, int qubit, double phi) {
    if (qubit < 0 || qubit >= st.layout.stored_qubits())
        throw ConfigError("apply_single_qubit_gate: qubit " + std::to_string(qubit) + " out of range");
    apply_gate_raw(st.amps, gate_matrix(g, phi), qubit);
}

namespace {

// cos of an angle that rounds to pi/2 (or 3pi/2) is returned as exactly zero,
// so a fully blocked ancilla reads as probability 0 rather than ~1e-33.
double block_cos(double t) {
    const double c = std::cos(t);
    return std::abs(c) <= std::numeric_limits<double>::epsilon() ? 0.0 : c;
}

}  // namespace

double pite_block(State& st, const ThetaDiagonal& theta, BlockMode mode) {
    const std::size_t ns = st.amps.size();
    const std::size_t m = theta.values.size();
    if (m == 0 || (m != ns && ns % m != 0)) throw ConfigError("pite_block: theta length mismatch");
    if (std::all_of(theta.values.begin(), theta.values.end(), [](double t) { return t == 0.0; })) return 1.0;
    double p = 0.0;
    if (mode == BlockMode::direct) {
        for (std::size_t j = 0; j < ns; ++j) {
            st.amps[j] *= block_cos(theta.values[j % m]);
            p += std::norm(st.amps[j]);
        }
    } else {
        // Full register with the ancilla as the top bit: Q† on the ancilla,
        // the real rotation [[c,-s],[s,c]] per system index, then Q.
        CVec full(2 * ns);
        std::copy(st.amps.begin(), st.amps.end(), full.begin());
        int top = 0;
        while ((std::size_t{1} << top) < ns) ++top;
        apply_gate_raw(full, gate_matrix(Gate::Qdag), top);
        for (std::size_t j = 0; j < ns; ++j) {
            const double c = block_cos(theta.values[j % m]), s = std::sin(theta.values[j % m]);
            const cplx a0 = full[j], a1 = full[ns + j];
            full[j] = c * a0 - s * a1;
            full[ns + j] = s * a0 + c * a1;
        }
        apply_gate_raw(full, gate_matrix(Gate::Q), top);
        for (std::size_t j = 0; j < ns; ++j) {
            st.amps[j] = full[j];
            p += std::norm(full[j]);
        }
    }
    if (!(p >= kMinStepProb)) throw NumericalAbort("vanished success probability");
    const double r = 1.0 / std::sqrt(p);
    for (auto& z : st.amps) z *= r;
    st.log_prob += std::log(p);
    return p;
}

void dump_state(const State& st, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os.write("PSV1", 4);
    const auto n_anc = static_cast<std::uint16_t>(st.layout.n_anc);
    const auto n_sp = static_cast<std::uint16_t>(st.layout.n_species);
    const auto d = static_cast<std::uint32_t>(st.layout.grid.d);
    const auto n = static_cast<std::uint32_t>(st.layout.grid.n);
    os.write(reinterpret_cast<const char*>(&n_anc), 2);
    os.write(reinterpret_cast<const char*>(&n_sp), 2);
    os.write(reinterpret_cast<const char*>(&d), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    const std::size_t full = st.layout.full_size();
    for (std::size_t j = 0; j < full; ++j) {
        const cplx z = j < st.amps.size() ? st.amps[j] : cplx(0.0);
        const double re = z.real(), im = z.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

StateDump read_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PSV1", 4) != 0) throw ConfigError("'" + path + "' is not a PSV1 dump");
    std::uint16_t n_anc = 0, n_sp = 0;
    std::uint32_t d = 0, n = 0;
    is.read(reinterpret_cast<char*>(&n_anc), 2);
    is.read(reinterpret_cast<char*>(&n_sp), 2);
    is.read(reinterpret_cast<char*>(&d), 4);
    is.read(reinterpret_cast<char*>(&n), 4);
    if (!is) throw ConfigError("truncated PSV1 header");
    const int qubits = n_anc + n_sp + static_cast<int>(d * n);
    if (qubits > 40) throw ConfigError("PSV1 header describes an oversized register");
    StateDump out{n_anc, n_sp, static_cast<int>(d), static_cast<int>(n), CVec(std::size_t{1} << qubits)};
    for (auto& z : out.full) {
        double re = 0, im = 0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        z = cplx(re, im);
    }
    if (!is) throw ConfigError("truncated PSV1 payload");
    return out;
}

State load_state(const std::string& path, double L) {
    const auto dmp = read_dump(path);
    State st = make_state(GridSpec(dmp.d, dmp.n, L), dmp.n_species, dmp.n_anc);
    set_statevector(st, dmp.full);
    st.scale = 1.0;
    return st;
}

}  // namespace pite
