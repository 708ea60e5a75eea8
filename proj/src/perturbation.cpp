#include "effham/perturbation.hpp"

#include <cmath>

#include "effham/parallel.hpp"
#include "effham/quadrature.hpp"

namespace effham {

namespace {

const Complex I(0.0, 1.0);
using Mat2 = Eigen::Matrix2cd;

enum class Coupling { SigmaZ, SigmaX, Generic };

Coupling classify(const Operator& a, bool force_generic) {
    if (force_generic) return Coupling::Generic;
    if ((a - pauli_z()).cwiseAbs().maxCoeff() < 1e-14) return Coupling::SigmaZ;
    if ((a - pauli_x()).cwiseAbs().maxCoeff() < 1e-14) return Coupling::SigmaX;
    return Coupling::Generic;
}

void validate_model(const SpinModel& model) {
    if (model.coupling_op.rows() != 2 || model.coupling_op.cols() != 2)
        throw std::invalid_argument("SpinModel: coupling operator must be 2x2");
    if (!is_hermitian(model.coupling_op))
        throw std::invalid_argument("SpinModel: coupling operator must be Hermitian");
}

// Everything the simplex quadrature needs, sampled once on the grid.
struct SeriesContext {
    BathGrid grid;
    double omega = 0.0;
    Coupling kind = Coupling::Generic;
    std::vector<Complex> unit;     // exp(i omega t_j), drives the closed-form phases
    std::vector<Mat2> a_cache;     // A(t_j) for the generic path
};

SeriesContext make_context(const SpinModel& model, const BathSpec& bath, double t_max,
                           double step, bool force_generic) {
    validate_model(model);
    if (bath.j.kind == SpectralDensity::Kind::Drude)
        throw std::invalid_argument(
            "perturbation series: the Drude kernel diverges at coincident times; "
            "use OhmicExp or DiscreteModes");
    SeriesContext ctx;
    ctx.grid = make_bath_grid(bath, t_max, step);
    ctx.omega = model.omega;
    ctx.kind = classify(model.coupling_op, force_generic);
    const long n = ctx.grid.points();
    ctx.unit.resize(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) {
        const double t = step * static_cast<double>(j);
        ctx.unit[static_cast<std::size_t>(j)] = std::polar(1.0, model.omega * t);
    }
    if (ctx.kind == Coupling::Generic) {
        ctx.a_cache.resize(static_cast<std::size_t>(n));
        for (long j = 0; j < n; ++j)
            ctx.a_cache[static_cast<std::size_t>(j)] =
                interaction_picture_a(model, step * static_cast<double>(j));
    }
    return ctx;
}

// exp(i phi(t_1..t_m)) with phi = omega sum_j (-1)^{j+1} t_j, from the unit table
Complex phase_product(const SeriesContext& ctx, const long* idx, int m) {
    Complex u = 1.0;
    for (int j = 0; j < m; ++j) {
        const Complex e = ctx.unit[static_cast<std::size_t>(idx[j])];
        u *= (j % 2 == 0) ? e : std::conj(e);
    }
    return u;
}

Mat2 product_from_cache(const SeriesContext& ctx, const long* idx, int m) {
    Mat2 p = Mat2::Identity();
    for (int j = 0; j < m; ++j) p *= ctx.a_cache[static_cast<std::size_t>(idx[j])];
    return p;
}

// X operator of one tuple; returns false when it vanishes identically.
bool x_of_tuple(const SeriesContext& ctx, const long* tau, int k, const long* s, int q,
                Mat2& x) {
    switch (ctx.kind) {
        case Coupling::SigmaZ: {
            if (q % 2 != 0) return false;
            x = Mat2::Identity();
            if (k % 2 != 0) x(1, 1) = -1.0;
            return true;
        }
        case Coupling::SigmaX: {
            if (q % 2 != 0) return false;
            const double cos_s = phase_product(ctx, s, q).real();
            const Complex e_tau = phase_product(ctx, tau, k);
            x = Mat2::Zero();
            if (k % 2 == 0) {
                x(0, 0) = cos_s * e_tau;
                x(1, 1) = cos_s * std::conj(e_tau);
            } else {
                x(0, 1) = cos_s * e_tau;
                x(1, 0) = cos_s * std::conj(e_tau);
            }
            return true;
        }
        case Coupling::Generic: {
            const Complex tr = std::conj(product_from_cache(ctx, s, q).trace());
            x = (0.5 * tr) * product_from_cache(ctx, tau, k);
            return true;
        }
    }
    return false;
}

// Bare moment of one chunk (tau[t0..t1), s[s0..s1)) from the grid; string
// layout as in bath.cpp: reversed s piece, then the tau piece.
Complex chunk_moment(const SeriesContext& ctx, const long* tau, int t0, int t1,
                     const long* s, int s0, int s1) {
    long pos[kMaxMomentOrder];
    const int ns = s1 - s0;
    const int nt = t1 - t0;
    for (int i = 0; i < ns; ++i) pos[i] = s[s1 - 1 - i];
    for (int j = 0; j < nt; ++j) pos[ns + j] = tau[t0 + j];
    const int n = ns + nt;
    if (n == 0) return 1.0;
    Complex pair_pq[kMaxMomentOrder * kMaxMomentOrder];
    for (int p = 0; p < n; ++p)
        for (int r = p + 1; r < n; ++r)
            pair_pq[p * kMaxMomentOrder + r] = ctx.grid.pair(pos[p], pos[r]);
    double means[kMaxMomentOrder];
    if (!ctx.grid.zero_mean)
        for (int p = 0; p < n; ++p)
            means[p] = ctx.grid.mean[static_cast<std::size_t>(pos[p])];
    detail::MomentTable table;
    table.fill(n, pair_pq, ctx.grid.zero_mean ? nullptr : means);
    return table.moment((1u << n) - 1u);
}

// One consecutive chunk of a chain decomposition of the ordered cumulant.
struct ChunkSpec {
    int t0, t1;  // tau piece [t0, t1)
    int s0, s1;  // s piece [s0, s1)
};

// A single integration variable. Every level is bounded either by the
// previous element of its own chunk piece (simplex ordering) or by t; times
// in different chunks are independent.
struct LevelSpec {
    bool is_tau = false;
    int pos = 0;             // index within tau[] or s[]
    int bound_level = -1;    // level holding the previous element, or -1 for t
    int finalize_chunk = -1; // chunk completed once this level is set
};

// The unrolled recursion: Dcal = sum_m (-1)^(m-1) sum_chains
// Ddot(chunk_1) D(chunk_2) ... D(chunk_m), with the delta of Ddot pinning the
// head of the selected list (so chunk_1 must contain it).
struct DecompPlan {
    std::vector<ChunkSpec> chunks;
    std::vector<LevelSpec> levels;
    double sign = 1.0;  // (-1)^(m-1)
    Complex base = 1.0; // product of moments of chunks with no free level
};

std::vector<DecompPlan> build_plans(const SeriesContext& ctx, long it, int k, int q,
                                    bool pin_left) {
    std::vector<DecompPlan> plans;
    std::vector<std::pair<int, int>> chain{{0, 0}};

    auto emit = [&]() {
        DecompPlan plan;
        const int m = static_cast<int>(chain.size()) - 1;
        plan.sign = (m % 2 == 1) ? 1.0 : -1.0;
        for (int c = 0; c < m; ++c) {
            const ChunkSpec chunk{chain[static_cast<std::size_t>(c)].first,
                                  chain[static_cast<std::size_t>(c + 1)].first,
                                  chain[static_cast<std::size_t>(c)].second,
                                  chain[static_cast<std::size_t>(c + 1)].second};
            if (ctx.grid.zero_mean && ((chunk.t1 - chunk.t0 + chunk.s1 - chunk.s0) % 2 == 1))
                return;  // odd Gaussian moment
            plan.chunks.push_back(chunk);
        }
        for (int c = 0; c < m; ++c) {
            const ChunkSpec& chunk = plan.chunks[static_cast<std::size_t>(c)];
            const std::size_t first_level = plan.levels.size();
            int prev = -1;  // level of the previous element in the same piece
            for (int p = chunk.t0; p < chunk.t1; ++p) {
                if (c == 0 && pin_left && p == 0) continue;  // head fixed at t
                plan.levels.push_back({true, p, prev, -1});
                prev = static_cast<int>(plan.levels.size()) - 1;
            }
            prev = -1;
            for (int p = chunk.s0; p < chunk.s1; ++p) {
                if (c == 0 && !pin_left && p == 0) continue;
                plan.levels.push_back({false, p, prev, -1});
                prev = static_cast<int>(plan.levels.size()) - 1;
            }
            if (plan.levels.size() > first_level) {
                plan.levels.back().finalize_chunk = c;
            } else {
                // the pinned singleton chunk has no free variables
                const long head[1] = {it};
                plan.base *= pin_left ? chunk_moment(ctx, head, 0, 1, nullptr, 0, 0)
                                      : chunk_moment(ctx, nullptr, 0, 0, head, 0, 1);
            }
        }
        if (plan.base != 0.0) plans.push_back(std::move(plan));
    };

    auto extend = [&](auto&& self) -> void {
        const auto [cl, cr] = chain.back();
        if (cl == k && cr == q) {
            if (chain.size() > 1) emit();
            return;
        }
        for (int l = cl; l <= k; ++l)
            for (int r = cr; r <= q; ++r) {
                if (l == cl && r == cr) continue;
                if (chain.size() == 1) {  // chunk 1 must hold the pinned head
                    if (pin_left && l < 1) continue;
                    if (!pin_left && r < 1) continue;
                }
                chain.emplace_back(l, r);
                self(self);
                chain.pop_back();
            }
    };
    extend(extend);
    return plans;
}

// Accumulation mode: plain Dcal * X for the direct assembly, or the
// symmetry-resolved combinations of Re/Im(Dcal) with X_R/X_I.
enum class Assembly { Direct, SymmetryResolved };

// Enumerates both delta branches of one (k, q) split and accumulates
// weight * Dcal * X into `acc`. Each chain decomposition integrates over the
// product of its per-chunk ordered simplices.
void accumulate_split(const SeriesContext& ctx, long it, int n, int k, Assembly mode,
                      Mat2& acc) {
    const int q = n - k;
    const double h = ctx.grid.step;
    const int m_half = n / 2;
    // sign in front of the split: (-1)^k for the direct route; the
    // symmetry-resolved forms carry (-1)^(m+k+1) (even) / (-1)^(m+k) (odd).
    double split_sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (mode == Assembly::SymmetryResolved)
        split_sign *= ((n % 2 == 0) ? -1.0 : 1.0) * ((m_half % 2 == 0) ? 1.0 : -1.0);

    long tau[kMaxMomentOrder + 1], s[kMaxMomentOrder + 1];
    if (k > 0) tau[0] = it;
    if (q > 0) s[0] = it;

    auto run_branch = [&](bool pin_left) {
        if (pin_left) tau[0] = it;
        else s[0] = it;
        for (const DecompPlan& plan : build_plans(ctx, it, k, q, pin_left)) {
            const double plan_sign = split_sign * plan.sign;

            auto leaf = [&](double w, Complex cum) {
                Mat2 x;
                if (!x_of_tuple(ctx, tau, k, s, q, x)) return;
                const double cw = plan_sign * w;
                if (mode == Assembly::Direct) {
                    acc += (cw * cum) * x;
                } else {
                    const Mat2 xr = 0.5 * (x + x.adjoint());
                    const Mat2 xi = (0.5 / I) * (x - x.adjoint());
                    if (n % 2 == 0)
                        acc += cw * (cum.real() * xi + cum.imag() * xr);
                    else
                        acc += cw * (cum.imag() * xi - cum.real() * xr);
                }
            };

            auto recurse = [&](auto&& self, std::size_t lvl_idx, double w,
                               Complex cum) -> void {
                if (lvl_idx == plan.levels.size()) {
                    leaf(w, cum);
                    return;
                }
                const LevelSpec& lvl = plan.levels[lvl_idx];
                long* list = lvl.is_tau ? tau : s;
                const long upper =
                    lvl.bound_level < 0
                        ? it
                        : (plan.levels[static_cast<std::size_t>(lvl.bound_level)].is_tau
                               ? tau[plan.levels[static_cast<std::size_t>(lvl.bound_level)].pos]
                               : s[plan.levels[static_cast<std::size_t>(lvl.bound_level)].pos]);
                if (upper == 0) return;  // zero-length integration range
                for (long i = upper; i >= 0; --i) {
                    list[lvl.pos] = i;
                    double w2 = w * quad::trapezoid_weight(i, upper, h);
                    Complex cum2 = cum;
                    if (lvl.finalize_chunk >= 0) {
                        const ChunkSpec& chunk =
                            plan.chunks[static_cast<std::size_t>(lvl.finalize_chunk)];
                        cum2 *= chunk_moment(ctx, tau, chunk.t0, chunk.t1, s, chunk.s0,
                                             chunk.s1);
                        if (cum2 == 0.0) continue;
                    }
                    self(self, lvl_idx + 1, w2, cum2);
                }
            };

            if (plan.levels.empty()) {
                leaf(1.0, plan.base);
            } else {
                recurse(recurse, 0, 1.0, plan.base);
            }
        }
    };

    if (k >= 1) run_branch(true);
    if (q >= 1) run_branch(false);
}

Operator k_zero(const SpinModel& model) {
    return traceless_part(0.5 * model.omega * pauli_z());
}

long grid_index(double t, double step, long max_index, const char* who) {
    const long it = std::llround(t / step);
    if (std::abs(static_cast<double>(it) * step - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw std::invalid_argument(std::string(who) + ": t must lie on the quadrature grid");
    if (it < 0 || it > max_index)
        throw std::out_of_range(std::string(who) + ": t outside the tabulated range");
    return it;
}

Operator k_order_with_context(const SeriesContext& ctx, const SpinModel& model, int n,
                              long it, Assembly mode) {
    if (n < 0 || n > kMaxSeriesOrder)
        throw std::invalid_argument("k_order: order must be in 0..4");
    if (n == 0) return k_zero(model);
    Mat2 acc = Mat2::Zero();
    for (int k = 0; k <= n; ++k) accumulate_split(ctx, it, n, k, mode, acc);
    Mat2 kn;
    if (mode == Assembly::Direct) {
        // i^(n+1)/2 (M - (-1)^n M^dag)
        Complex pref = 0.5;
        for (int j = 0; j < n + 1; ++j) pref *= I;
        const double hc_sign = (n % 2 == 0) ? 1.0 : -1.0;
        kn = pref * (acc - hc_sign * acc.adjoint());
    } else {
        kn = acc;
    }
    return traceless_part(hermitian_part(Operator(kn)));
}

}  // namespace

SpinModel SpinModel::dephasing(double omega, double lambda) {
    return {omega, pauli_z(), lambda};
}

SpinModel SpinModel::unbiased(double omega, double lambda) {
    return {omega, pauli_x(), lambda};
}

SpinModel SpinModel::with_coupling(double omega, double lambda, Operator a) {
    SpinModel m{omega, std::move(a), lambda};
    validate_model(m);
    return m;
}

Operator interaction_picture_a(const SpinModel& model, double t) {
    validate_model(model);
    // H_S is diagonal, so the conjugation is a phase on each entry:
    // (e^{iH_S t} A e^{-iH_S t})_{jk} = A_{jk} e^{i(phi_j - phi_k)}
    const Complex e = std::polar(1.0, model.omega * t);
    Operator a = model.coupling_op;
    a(0, 1) *= e;
    a(1, 0) *= std::conj(e);
    return a;
}

Operator a_product(const SpinModel& model, std::span<const double> times) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] > times[i - 1] + 1e-12)
            throw std::invalid_argument("a_product: times must be descending");
    Operator p = identity_op(2);
    for (double t : times) p = p * interaction_picture_a(model, t);
    return p;
}

Operator x_operator(const SpinModel& model, std::span<const double> left_times,
                    std::span<const double> right_times) {
    const Complex tr = std::conj(a_product(model, right_times).trace());
    return (0.5 * tr) * a_product(model, left_times);
}

Operator k_order(const SpinModel& model, const BathSpec& bath, int n, double t,
                 const QuadratureScheme& quad, const KOrderOptions& opts) {
    if (n == 0) return k_zero(model);
    if (n < 0 || n > kMaxSeriesOrder)
        throw std::invalid_argument("k_order: order must be in 0..4");
    if (t == 0.0 && n != 1) return Operator::Zero(2, 2);
    const double t_max = std::max(t, quad.step);
    SeriesContext ctx = make_context(model, bath, t_max, quad.step, opts.force_generic);
    const long it = grid_index(t, quad.step, ctx.grid.points() - 1, "k_order");
    return k_order_with_context(ctx, model, n, it, Assembly::Direct);
}

Operator k_order_symmetry_resolved(const SpinModel& model, const BathSpec& bath, int n,
                                   double t, const QuadratureScheme& quad,
                                   const KOrderOptions& opts) {
    if (n == 0) return k_zero(model);
    if (n < 0 || n > kMaxSeriesOrder)
        throw std::invalid_argument("k_order_symmetry_resolved: order must be in 0..4");
    if (t == 0.0 && n != 1) return Operator::Zero(2, 2);
    const double t_max = std::max(t, quad.step);
    SeriesContext ctx = make_context(model, bath, t_max, quad.step, opts.force_generic);
    const long it =
        grid_index(t, quad.step, ctx.grid.points() - 1, "k_order_symmetry_resolved");
    return k_order_with_context(ctx, model, n, it, Assembly::SymmetryResolved);
}

Operator k2_closed_form(const SpinModel& model, const BathSpec& bath, double t,
                        const QuadratureScheme& quad) {
    validate_model(model);
    if (!bath.zero_mean())
        throw std::invalid_argument("k2_closed_form: requires a zero-mean Gaussian bath");
    if (t == 0.0) return Operator::Zero(2, 2);
    const long it = std::llround(t / quad.step);
    if (std::abs(static_cast<double>(it) * quad.step - t) > 1e-9 * std::max(1.0, t))
        throw std::invalid_argument("k2_closed_form: t must lie on the quadrature grid");
    const BathGrid grid = make_bath_grid(bath, t, quad.step);
    const Operator a_t = interaction_picture_a(model, t);
    Operator acc = Operator::Zero(2, 2);
    for (long j = 0; j <= it; ++j) {
        const double w = quad::trapezoid_weight(j, it, quad.step);
        const Complex c = grid.pair(it, j);  // C(t - tau_j)
        const double s_val = c.real();
        const double chi = -2.0 * c.imag();
        const Operator a_j = interaction_picture_a(model, quad.step * static_cast<double>(j));
        const Operator anti = anticommutator(a_t, a_j);
        acc += w * ((0.5 / I) * s_val * commutator(a_t, a_j) -
                    0.25 * chi * (anti - 0.5 * anti.trace() * identity_op(2)));
    }
    return traceless_part(hermitian_part(acc));
}

KSeries k_series(const SpinModel& model, const BathSpec& bath, int max_order,
                 std::span<const double> times, const QuadratureScheme& quad) {
    validate_model(model);
    if (max_order < 0 || max_order > kMaxSeriesOrder)
        throw std::invalid_argument("k_series: max_order must be in 0..4");
    if (times.empty()) throw std::invalid_argument("k_series: empty time grid");
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    t_max = std::max(t_max, quad.step);

    SeriesContext ctx = make_context(model, bath, t_max, quad.step, false);
    std::vector<long> indices(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        indices[i] = grid_index(times[i], quad.step, ctx.grid.points() - 1, "k_series");

    KSeries series;
    series.times.assign(times.begin(), times.end());
    series.metadata = {max_order, quad.step, model.lambda,
                       (ctx.kind == Coupling::SigmaZ   ? "sigma_z"
                        : ctx.kind == Coupling::SigmaX ? "sigma_x"
                                                       : "generic"),
                       bath.describe()};
    for (int n = 0; n <= max_order; ++n)
        series.orders[n].resize(times.size());

    // lab-frame rotation e^{-i H_S t} K e^{i H_S t}
    auto rotate = [&](Operator k, double t) {
        const Complex e = std::polar(1.0, -model.omega * t);
        k(0, 1) *= e;
        k(1, 0) *= std::conj(e);
        return k;
    };

    parallel_for(times.size(), [&](std::size_t i) {
        for (int n = 0; n <= max_order; ++n)
            series.orders[n][i] = rotate(
                k_order_with_context(ctx, model, n, indices[i], Assembly::Direct),
                series.times[i]);
    });

    for (int n = 0; n <= max_order; ++n) {
        auto& sums = series.partial_sums[n];
        sums.resize(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            Operator acc = Operator::Zero(2, 2);
            double pow_l = 1.0;
            for (int m = 0; m <= n; ++m) {
                acc += pow_l * series.orders[m][i];
                pow_l *= model.lambda;
            }
            sums[i] = acc;
        }
    }
    return series;
}

KSeries with_lambda(const KSeries& series, double lambda) {
    KSeries out = series;
    out.metadata.lambda = lambda;
    for (auto& [n, sums] : out.partial_sums) {
        for (std::size_t i = 0; i < sums.size(); ++i) {
            Operator acc = Operator::Zero(2, 2);
            double pow_l = 1.0;
            for (int m = 0; m <= n; ++m) {
                acc += pow_l * out.orders.at(m)[i];
                pow_l *= lambda;
            }
            sums[i] = acc;
        }
    }
    return out;
}

std::vector<ObservableRow> report_observables(const KSeries& series) {
    if (series.partial_sums.empty())
        throw std::invalid_argument("report_observables: empty series");
    const auto& top = series.partial_sums.rbegin()->second;
    std::vector<ObservableRow> rows(series.times.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Operator& k = top[i];
        if (k.rows() != 2) throw std::invalid_argument("report_observables: d != 2");
        ObservableRow& r = rows[i];
        r.t = series.times[i];
        r.omega_r = (k * pauli_z()).trace().real();
        r.kx = (k * pauli_x()).trace().real();
        r.ky = (k * pauli_y()).trace().real();
        r.rotation_angle = std::atan2(std::hypot(r.kx, r.ky), r.omega_r);
    }
    return rows;
}

}  // namespace effham
