#ifndef EFFHAM_BATH_HPP
#define EFFHAM_BATH_HPP

#include <bit>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace effham {

using Complex = std::complex<double>;

struct Mode {
    double g = 0.0;      // coupling frequency
    double omega = 0.0;  // mode frequency
};

struct SpectralDensity {
    enum class Kind { OhmicExp, Drude, DiscreteModes };
    Kind kind = Kind::OhmicExp;
    double alpha = 0.0, omega_c = 0.0;        // J(w) = alpha w exp(-w/omega_c)
    // J(w) = (2/pi) lambda gamma w / (w^2 + gamma^2); lambda = int J(w)/w dw
    double lambda_reorg = 0.0, gamma_c = 0.0;
    std::vector<Mode> modes;                  // J(w) = sum_j g_j^2 delta(w - w_j)

    static SpectralDensity ohmic_exp(double alpha, double omega_c);
    static SpectralDensity drude(double lambda, double gamma);
    static SpectralDensity discrete_modes(std::vector<Mode> modes);
};

// m(t) = amp_cos cos(omega t) + amp_sin sin(omega t); a sum of such terms
// covers coherently displaced mode ensembles.
struct MeanTerm {
    double amp_cos = 0.0;
    double amp_sin = 0.0;
    double omega = 0.0;
};

struct BathSpec {
    SpectralDensity j;
    double beta = std::numeric_limits<double>::infinity();  // +inf = zero temperature
    std::vector<MeanTerm> mean;                             // empty = zero mean

    bool zero_mean() const { return mean.empty(); }
    double mean_at(double t) const;
    std::string describe() const;

    // displacement alpha on a mode (g, omega): m(t) = 2 g Re(alpha e^{-i omega t})
    static MeanTerm coherent_mean(double g, double omega, Complex alpha);
};

// Centered stationary two-point function
//   C(u) = int dw J(w) [coth(beta w / 2) cos(w u) - i sin(w u)].
// Discrete spectra reduce to finite sums; the Ohmic form at beta = +inf uses
// the closed form alpha omega_c^2 / (1 + i omega_c u)^2. The Drude kernel is
// evaluated by its Matsubara series and is logarithmically divergent at u = 0.
Complex thermal_correlation(const BathSpec& bath, double u);

struct NoiseResponse {
    double s = 0.0;    // noise kernel, symmetric in t <-> s
    double chi = 0.0;  // response function, antisymmetric
};
NoiseResponse noise_and_response(const BathSpec& bath, double t, double s);

struct CorrelationTable {
    double step = 0.0;
    double t_max = 0.0;
    std::vector<Complex> c;  // C(j * step), j = 0..n

    long points() const { return static_cast<long>(c.size()); }
    Complex at_index(long j) const { return j >= 0 ? c[j] : std::conj(c[-j]); }
    // linear interpolation on |u|, extended by C(-u) = conj C(u)
    Complex value(double u) const;
};

// Tabulates C on a uniform grid over [0, T]; the step is adjusted to the
// nearest exact divisor of T. Continuous spectral densities are integrated
// adaptively to relative tolerance 1e-8.
CorrelationTable build_correlation_table(const BathSpec& bath, double t_max, double step);

constexpr int kMaxMomentOrder = 6;

// Bare moment D(tau_1^k, s_1^q): expectation of the left/right-ordered
// operator string B(s_q)...B(s_1) B(tau_1)...B(tau_k) in the bath state,
// evaluated by Isserlis pairing of the mean-shifted Gaussian.
Complex wick_moment(const BathSpec& bath, std::span<const double> left_times,
                    std::span<const double> right_times);

// Which list carries the delta-pinned head time in the cumulant recursion.
enum class PinnedList { Left, Right };

// Ordered cumulant of the bare moments,
//   D_cal = Ddot - sum_{(l,r) != (k,q)} D_cal(prefix) D(suffix chunk),
// reduced to the branch selected by the delta convention (the head of the
// pinned list equals t). When both heads equal t the two branch values add.
Complex ordered_cumulant(const BathSpec& bath, double t, std::span<const double> left_times,
                         std::span<const double> right_times);

// Single-branch evaluation with explicit pinning (used by the perturbation
// quadrature, which enumerates the two delta branches separately).
Complex ordered_cumulant_branch(const BathSpec& bath, double t,
                                std::span<const double> left_times,
                                std::span<const double> right_times, PinnedList pinned);

// --- grid-sampled bath for simplex quadrature -------------------------------

// Correlation and mean sampled on a uniform grid. The nested time-ordered
// integrals in the perturbation series only ever evaluate the bath at integer
// multiples of the step, so lookups replace function calls in the hot loop.
struct BathGrid {
    double step = 0.0;
    std::vector<Complex> corr;  // C(j * step)
    std::vector<double> mean;   // m(j * step)
    bool zero_mean = true;

    long points() const { return static_cast<long>(corr.size()); }
    // <B(t_i) B(t_j)> centered, t = index * step
    Complex pair(long i, long j) const {
        return i >= j ? corr[static_cast<std::size_t>(i - j)]
                      : std::conj(corr[static_cast<std::size_t>(j - i)]);
    }
};

BathGrid make_bath_grid(const BathSpec& bath, double t_max, double step);

namespace detail {

// Moments of every subset of an operator string of n <= 6 positions, built by
// the pairing recursion M(S) = m(p) M(S\p) + sum_q pair(p,q) M(S\{p,q}) with
// p the leftmost position of S. Segment moments of the cumulant recursion are
// then plain lookups.
struct MomentTable {
    int n = 0;
    Complex m[1 << kMaxMomentOrder];

    // pair_pq must hold the centered covariance with the row position earlier
    // in the string; means may be null for zero-mean baths.
    void fill(int n_, const Complex* pair_pq, const double* means) {
        n = n_;
        m[0] = 1.0;
        const unsigned full = (1u << n) - 1u;
        for (unsigned mask = 1; mask <= full; ++mask) {
            const int p = std::countr_zero(mask);
            const unsigned rest = mask & (mask - 1);
            Complex val = means ? means[p] * m[rest] : Complex(0.0);
            unsigned scan = rest;
            while (scan) {
                const int q = std::countr_zero(scan);
                scan &= scan - 1;
                val += pair_pq[p * kMaxMomentOrder + q] * m[rest & ~(1u << q)];
            }
            m[mask] = val;
        }
    }

    Complex moment(unsigned mask) const { return m[mask]; }
};

// Reduced ordered cumulant over string positions. The string layout is the
// reversed right list (positions 0..q-1 hold s_q..s_1) followed by the left
// list (positions q..q+k-1 hold tau_1..tau_k).
inline Complex reduced_cumulant(int k, int q, const MomentTable& table, bool pin_left) {
    auto range_mask = [](int lo, int len) -> unsigned {
        return len <= 0 ? 0u : ((1u << len) - 1u) << lo;
    };
    // prefix (tau_1..tau_l, s_1..s_r) occupies string positions [q-r, q+l)
    auto prefix_mask = [&](int l, int r) { return range_mask(q - r, l + r); };
    // chunk (tau_{l'+1..l}, s_{r'+1..r})
    auto chunk_mask = [&](int lp, int l, int rp, int r) {
        return range_mask(q + lp, l - lp) | range_mask(q - r, r - rp);
    };

    Complex r_tab[kMaxMomentOrder + 1][kMaxMomentOrder + 1];
    const int l0 = pin_left ? 1 : 0;
    const int r0 = pin_left ? 0 : 1;
    for (int l = l0; l <= k; ++l)
        for (int r = r0; r <= q; ++r) {
            Complex val = table.moment(prefix_mask(l, r));
            for (int lp = l0; lp <= l; ++lp)
                for (int rp = r0; rp <= r; ++rp) {
                    if (lp == l && rp == r) continue;
                    val -= r_tab[lp][rp] * table.moment(chunk_mask(lp, l, rp, r));
                }
            r_tab[l][r] = val;
        }
    return r_tab[k][q];
}

}  // namespace detail
}  // namespace effham

#endif
