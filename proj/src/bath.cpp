#include "effham/bath.hpp"

#include <cmath>

#include "effham/quadrature.hpp"

namespace effham {

namespace {

const Complex I(0.0, 1.0);

double coth(double x) {
    if (x > 20.0) return 1.0;
    return 1.0 / std::tanh(x);
}

bool is_descending(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + 1e-12) return false;
    return true;
}

Complex ohmic_zero_t(double alpha, double omega_c, double u) {
    const Complex den = 1.0 + I * omega_c * u;
    return alpha * omega_c * omega_c / (den * den);
}

Complex ohmic_thermal(double alpha, double omega_c, double beta, double u) {
    // integrand is smooth: J(w) coth(beta w/2) -> 2 alpha / beta as w -> 0
    const double w_max = 60.0 * omega_c;
    return quad::integrate(
        [=](double w) -> Complex {
            const double jw = alpha * w * std::exp(-w / omega_c);
            return jw * (coth(0.5 * beta * w) * std::cos(w * u) - I * std::sin(w * u));
        },
        0.0, w_max, 1e-9, 1e-14);
}

Complex drude_series(double lambda, double gamma, double beta, double u) {
    const double au = std::abs(u);
    if (au < 1e-12)
        throw std::domain_error(
            "Drude correlation function diverges logarithmically at u = 0");
    Complex c = lambda * gamma * Complex(1.0 / std::tan(0.5 * beta * gamma), -1.0) *
                std::exp(-gamma * au);
    for (int k = 1; k < 2000000; ++k) {
        const double nu = 2.0 * M_PI * k / beta;
        if (std::abs(nu - gamma) < 1e-9 * gamma)
            throw std::domain_error("Drude series: Matsubara frequency hits the cutoff pole");
        const double term = 4.0 * lambda * gamma / beta * nu / (nu * nu - gamma * gamma) *
                            std::exp(-nu * au);
        c += term;
        if (k > 8 && std::abs(term) < 1e-14 * (1.0 + std::abs(c))) break;
    }
    return u >= 0.0 ? c : std::conj(c);
}

}  // namespace

SpectralDensity SpectralDensity::ohmic_exp(double alpha, double omega_c) {
    if (alpha < 0.0 || omega_c <= 0.0)
        throw std::invalid_argument("ohmic_exp: need alpha >= 0 and omega_c > 0");
    SpectralDensity j;
    j.kind = Kind::OhmicExp;
    j.alpha = alpha;
    j.omega_c = omega_c;
    return j;
}

SpectralDensity SpectralDensity::drude(double lambda, double gamma) {
    if (lambda < 0.0 || gamma <= 0.0)
        throw std::invalid_argument("drude: need lambda >= 0 and gamma > 0");
    SpectralDensity j;
    j.kind = Kind::Drude;
    j.lambda_reorg = lambda;
    j.gamma_c = gamma;
    return j;
}

SpectralDensity SpectralDensity::discrete_modes(std::vector<Mode> modes) {
    for (const auto& m : modes)
        if (m.omega <= 0.0) throw std::invalid_argument("discrete_modes: need omega > 0");
    SpectralDensity j;
    j.kind = Kind::DiscreteModes;
    j.modes = std::move(modes);
    return j;
}

double BathSpec::mean_at(double t) const {
    double m = 0.0;
    for (const auto& term : mean)
        m += term.amp_cos * std::cos(term.omega * t) + term.amp_sin * std::sin(term.omega * t);
    return m;
}

MeanTerm BathSpec::coherent_mean(double g, double omega, Complex alpha) {
    return {2.0 * g * alpha.real(), 2.0 * g * alpha.imag(), omega};
}

std::string BathSpec::describe() const {
    char buf[96];
    std::string out;
    switch (j.kind) {
        case SpectralDensity::Kind::OhmicExp:
            std::snprintf(buf, sizeof(buf), "ohmic_exp(alpha=%g, omega_c=%g)", j.alpha,
                          j.omega_c);
            out = buf;
            break;
        case SpectralDensity::Kind::Drude:
            std::snprintf(buf, sizeof(buf), "drude(lambda=%g, gamma=%g)", j.lambda_reorg,
                          j.gamma_c);
            out = buf;
            break;
        case SpectralDensity::Kind::DiscreteModes:
            std::snprintf(buf, sizeof(buf), "discrete(%zu modes)", j.modes.size());
            out = buf;
            break;
    }
    if (std::isinf(beta))
        out += ", beta=inf";
    else {
        std::snprintf(buf, sizeof(buf), ", beta=%g", beta);
        out += buf;
    }
    if (!zero_mean()) out += ", displaced";
    return out;
}

Complex thermal_correlation(const BathSpec& bath, double u) {
    if (bath.beta <= 0.0)
        throw std::invalid_argument("thermal_correlation: beta must be positive (or +inf)");
    const bool zero_t = std::isinf(bath.beta);
    switch (bath.j.kind) {
        case SpectralDensity::Kind::DiscreteModes: {
            Complex c = 0.0;
            for (const auto& m : bath.j.modes) {
                const double th = zero_t ? 1.0 : coth(0.5 * bath.beta * m.omega);
                c += m.g * m.g *
                     Complex(th * std::cos(m.omega * u), -std::sin(m.omega * u));
            }
            return c;
        }
        case SpectralDensity::Kind::OhmicExp:
            return zero_t ? ohmic_zero_t(bath.j.alpha, bath.j.omega_c, u)
                          : ohmic_thermal(bath.j.alpha, bath.j.omega_c, bath.beta, u);
        case SpectralDensity::Kind::Drude:
            if (zero_t)
                throw std::invalid_argument(
                    "thermal_correlation: the Drude kernel requires finite beta");
            return drude_series(bath.j.lambda_reorg, bath.j.gamma_c, bath.beta, u);
    }
    throw std::logic_error("unreachable");
}

NoiseResponse noise_and_response(const BathSpec& bath, double t, double s) {
    const Complex c = thermal_correlation(bath, t - s);
    return {c.real(), -2.0 * c.imag()};
}

Complex CorrelationTable::value(double u) const {
    const double au = std::abs(u);
    if (au > t_max * (1.0 + 1e-9))
        throw std::out_of_range("CorrelationTable::value: |u| beyond table range");
    const double x = au / step;
    const long lo = std::max<long>(0, std::min(static_cast<long>(x), points() - 2));
    const double frac = x - static_cast<double>(lo);
    const Complex c = (1.0 - frac) * at_index(lo) + frac * at_index(lo + 1);
    return u >= 0.0 ? c : std::conj(c);
}

CorrelationTable build_correlation_table(const BathSpec& bath, double t_max, double step) {
    if (t_max <= 0.0 || step <= 0.0)
        throw std::invalid_argument("build_correlation_table: need T > 0 and h > 0");
    const long n = std::max<long>(1, std::llround(t_max / step));
    CorrelationTable table;
    table.t_max = t_max;
    table.step = t_max / static_cast<double>(n);  // endpoints land on 0 and T exactly
    table.c.resize(static_cast<std::size_t>(n) + 1);
    for (long j = 0; j <= n; ++j)
        table.c[static_cast<std::size_t>(j)] =
            thermal_correlation(bath, table.step * static_cast<double>(j));
    return table;
}

namespace {

// String layout shared by the moment and cumulant evaluators: reversed right
// list, then the left list.
void fill_string_times(std::span<const double> left, std::span<const double> right,
                       double* x) {
    const int q = static_cast<int>(right.size());
    for (int i = 0; i < q; ++i) x[i] = right[static_cast<std::size_t>(q - 1 - i)];
    for (std::size_t j = 0; j < left.size(); ++j) x[q + j] = left[j];
}

void fill_moment_table(const BathSpec& bath, std::span<const double> left,
                       std::span<const double> right, detail::MomentTable& table) {
    const int n = static_cast<int>(left.size() + right.size());
    if (n > kMaxMomentOrder)
        throw std::invalid_argument("bath moments support order <= 6");
    double x[kMaxMomentOrder];
    fill_string_times(left, right, x);
    Complex pair_pq[kMaxMomentOrder * kMaxMomentOrder];
    for (int p = 0; p < n; ++p)
        for (int r = p + 1; r < n; ++r)
            pair_pq[p * kMaxMomentOrder + r] = thermal_correlation(bath, x[p] - x[r]);
    double means[kMaxMomentOrder];
    if (!bath.zero_mean())
        for (int p = 0; p < n; ++p) means[p] = bath.mean_at(x[p]);
    table.fill(n, pair_pq, bath.zero_mean() ? nullptr : means);
}

void check_cumulant_args(double t, std::span<const double> left,
                         std::span<const double> right) {
    if (!is_descending(left) || !is_descending(right))
        throw std::invalid_argument("ordered_cumulant: time lists must be descending");
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (double v : left)
        if (v > t + tol) throw std::invalid_argument("ordered_cumulant: times must be <= t");
    for (double v : right)
        if (v > t + tol) throw std::invalid_argument("ordered_cumulant: times must be <= t");
}

}  // namespace

Complex wick_moment(const BathSpec& bath, std::span<const double> left_times,
                    std::span<const double> right_times) {
    if (!is_descending(left_times) || !is_descending(right_times))
        throw std::invalid_argument("wick_moment: time lists must be descending");
    const int n = static_cast<int>(left_times.size() + right_times.size());
    if (n == 0) return 1.0;
    detail::MomentTable table;
    fill_moment_table(bath, left_times, right_times, table);
    return table.moment((1u << n) - 1u);
}

Complex ordered_cumulant_branch(const BathSpec& bath, double t,
                                std::span<const double> left_times,
                                std::span<const double> right_times, PinnedList pinned) {
    check_cumulant_args(t, left_times, right_times);
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    if (pinned == PinnedList::Left) {
        if (left_times.empty() || std::abs(left_times.front() - t) > tol)
            throw std::invalid_argument("ordered_cumulant: left head must equal t");
    } else {
        if (right_times.empty() || std::abs(right_times.front() - t) > tol)
            throw std::invalid_argument("ordered_cumulant: right head must equal t");
    }
    detail::MomentTable table;
    fill_moment_table(bath, left_times, right_times, table);
    return detail::reduced_cumulant(static_cast<int>(left_times.size()),
                                    static_cast<int>(right_times.size()), table,
                                    pinned == PinnedList::Left);
}

Complex ordered_cumulant(const BathSpec& bath, double t, std::span<const double> left_times,
                         std::span<const double> right_times) {
    check_cumulant_args(t, left_times, right_times);
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    const bool left_pinned = !left_times.empty() && std::abs(left_times.front() - t) <= tol;
    const bool right_pinned = !right_times.empty() && std::abs(right_times.front() - t) <= tol;
    if (!left_pinned && !right_pinned)
        throw std::invalid_argument(
            "ordered_cumulant: the delta convention requires tau_1 = t or s_1 = t");
    Complex val = 0.0;
    if (left_pinned)
        val += ordered_cumulant_branch(bath, t, left_times, right_times, PinnedList::Left);
    if (right_pinned)
        val += ordered_cumulant_branch(bath, t, left_times, right_times, PinnedList::Right);
    return val;
}

BathGrid make_bath_grid(const BathSpec& bath, double t_max, double step) {
    if (t_max <= 0.0 || step <= 0.0)
        throw std::invalid_argument("make_bath_grid: need T > 0 and h > 0");
    const long n = std::llround(t_max / step);
    if (std::abs(static_cast<double>(n) * step - t_max) > 1e-9 * std::max(1.0, t_max))
        throw std::invalid_argument("make_bath_grid: step must divide the horizon");
    BathGrid grid;
    grid.step = step;
    grid.zero_mean = bath.zero_mean();
    grid.corr.resize(static_cast<std::size_t>(n) + 1);
    grid.mean.resize(static_cast<std::size_t>(n) + 1, 0.0);
    for (long j = 0; j <= n; ++j) {
        const double tj = step * static_cast<double>(j);
        grid.corr[static_cast<std::size_t>(j)] = thermal_correlation(bath, tj);
        if (!grid.zero_mean) grid.mean[static_cast<std::size_t>(j)] = bath.mean_at(tj);
    }
    return grid;
}

}  // namespace effham
