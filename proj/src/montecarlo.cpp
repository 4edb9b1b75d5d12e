#include "rigidnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rigidnet/errors.hpp"
#include "rigidnet/parallel.hpp"

namespace rigidnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Batch {
    std::uint64_t count = 0;
    Vector s1, s2;  // profit sums
};

struct ChunkStats {
    std::vector<Batch> batches;
    Vector defaults;
    Vector tau1, tau2, eps1, eps2;
    double w1 = 0.0, w2 = 0.0;
    std::uint64_t violations = 0;
    Vector tau_min, tau_max, eps_min, eps_max, pi_min, pi_max;
    std::map<std::uint64_t, std::uint64_t> masks;

    explicit ChunkStats(int n)
        : batches(kBatchCount),
          defaults(Vector::Zero(n)),
          tau1(Vector::Zero(n)),
          tau2(Vector::Zero(n)),
          eps1(Vector::Zero(n)),
          eps2(Vector::Zero(n)),
          tau_min(Vector::Constant(n, kInf)),
          tau_max(Vector::Constant(n, -kInf)),
          eps_min(Vector::Constant(n, kInf)),
          eps_max(Vector::Constant(n, -kInf)),
          pi_min(Vector::Constant(n, kInf)),
          pi_max(Vector::Constant(n, -kInf)) {
        for (Batch& b : batches) {
            b.s1 = Vector::Zero(n);
            b.s2 = Vector::Zero(n);
        }
    }
};

// Draw-to-realization map for each kind of signal.
class Evaluator {
public:
    Evaluator(const Solution& base, const EngineConfig& engine, const ShockModel& model, const SignalModel& signal)
        : base_(base), signal_(signal) {
        if (signal.is_full()) {
            full_profile_ = debt_profile(base.econ, base.leo, Vector::Zero(base.econ.n()));
        } else if (!signal.is_none()) {
            for (std::size_t c = 0; c < signal.num_cells(); ++c) {
                try {
                    cells_.push_back(solve(base.econ, engine, model, signal, SignalRealization::in_cell(c)));
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::EmptyCell) throw;
                    cells_.push_back(std::nullopt);
                }
            }
        }
    }

    Realization operator()(const Vector& eta) const {
        if (signal_.is_none()) return realize(base_.econ, base_.leo, base_.profile, base_.equil, eta);
        if (signal_.is_full()) {
            const Vector m = (base_.leo.L * eta).array().exp().matrix();
            const Equilibrium eq = maximal_equilibrium(base_.econ, base_.leo, *full_profile_, m);
            return realize(base_.econ, base_.leo, *full_profile_, eq, eta);
        }
        const auto c = signal_.cell_of(eta);
        if (!c || !cells_[*c]) throw Error(ErrorCode::EmptyCell, "draw fell outside every solvable signal cell");
        const Solution& s = *cells_[*c];
        return realize(s.econ, s.leo, s.profile, s.equil, eta);
    }

private:
    const Solution& base_;
    const SignalModel& signal_;
    std::optional<DebtProfile> full_profile_;
    std::vector<std::optional<Solution>> cells_;
};

template <class Body>
void for_each_draw(const ShockModel& model, const CampaignConfig& config, std::size_t chunk, Body body) {
    std::mt19937_64 gen = chunk_generator(config.seed, Stream::Campaign, chunk);
    const std::uint64_t begin = chunk * kChunkSize;
    const std::uint64_t end = std::min<std::uint64_t>(config.num_draws, begin + kChunkSize);
    Vector eta(model.n());
    for (std::uint64_t i = begin; i < end; ++i) {
        model.sample(gen, eta);
        body(i, eta);
    }
}

Histogram make_histogram(double lo, double hi, int bins) {
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    return h;
}

std::size_t bin_of(double x, double lo, double hi, int bins) {
    if (!(hi > lo)) return 0;
    const double f = (x - lo) / (hi - lo) * bins;
    return static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(f)), 0, bins - 1));
}

double stdev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string cascade_label(std::uint64_t mask, int n) {
    std::string s = "{";
    bool first = true;
    for (int k = 0; k < n; ++k) {
        if (!(mask >> k & 1u)) continue;
        if (!first) s += ",";
        s += std::to_string(k + 1);
        first = false;
    }
    return s + "}";
}

SimulationReport run_campaign(const Solution& base, const EngineConfig& engine, const ShockModel& model,
                              const SignalModel& signal, const CampaignConfig& config) {
    const int n = base.econ.n();
    if (model.n() != n) throw Error(ErrorCode::DimensionMismatch, "shock and economy differ in dimension");
    if (config.num_draws == 0) throw Error(ErrorCode::InvalidModel, "num_draws must be positive");
    if (config.bins <= 0) throw Error(ErrorCode::InvalidModel, "bins must be positive");
    if (n > 64) throw Error(ErrorCode::DimensionMismatch, "cascade signatures support at most 64 sectors");

    const Evaluator eval(base, engine, model, signal);
    const Vector& v0 = base.leo.v0;
    const std::size_t chunks = chunk_count(config.num_draws);
    const std::uint64_t N = config.num_draws;

    std::vector<ChunkStats> stats(chunks, ChunkStats(n));
    parallel_chunks(chunks, [&](std::size_t c) {
        ChunkStats& st = stats[c];
        for_each_draw(model, config, c, [&](std::uint64_t i, const Vector& eta) {
            const Realization r = eval(eta);
            Batch& b = st.batches[static_cast<std::size_t>(i * kBatchCount / N)];
            ++b.count;
            b.s1 += r.profit;
            b.s2 += r.profit.cwiseAbs2();
            std::uint64_t mask = 0;
            for (int k = 0; k < n; ++k) {
                if (in_default(r, k)) {
                    st.defaults(k) += 1.0;
                    mask |= std::uint64_t{1} << k;
                }
            }
            ++st.masks[mask];
            st.tau1 += r.tau;
            st.tau2 += r.tau.cwiseAbs2();
            st.eps1 += r.epsilon;
            st.eps2 += r.epsilon.cwiseAbs2();
            st.w1 += r.welfare;
            st.w2 += r.welfare * r.welfare;
            if (r.welfare > std::exp(v0.dot(eta)) * (1.0 + 1e-12)) ++st.violations;
            st.tau_min = st.tau_min.cwiseMin(r.tau);
            st.tau_max = st.tau_max.cwiseMax(r.tau);
            st.eps_min = st.eps_min.cwiseMin(r.epsilon);
            st.eps_max = st.eps_max.cwiseMax(r.epsilon);
            st.pi_min = st.pi_min.cwiseMin(r.profit);
            st.pi_max = st.pi_max.cwiseMax(r.profit);
        });
    });

    // Reduce in chunk order.
    ChunkStats total(n);
    for (const ChunkStats& st : stats) {
        for (int b = 0; b < kBatchCount; ++b) {
            total.batches[b].count += st.batches[b].count;
            total.batches[b].s1 += st.batches[b].s1;
            total.batches[b].s2 += st.batches[b].s2;
        }
        total.defaults += st.defaults;
        total.tau1 += st.tau1;
        total.tau2 += st.tau2;
        total.eps1 += st.eps1;
        total.eps2 += st.eps2;
        total.w1 += st.w1;
        total.w2 += st.w2;
        total.violations += st.violations;
        total.tau_min = total.tau_min.cwiseMin(st.tau_min);
        total.tau_max = total.tau_max.cwiseMax(st.tau_max);
        total.eps_min = total.eps_min.cwiseMin(st.eps_min);
        total.eps_max = total.eps_max.cwiseMax(st.eps_max);
        total.pi_min = total.pi_min.cwiseMin(st.pi_min);
        total.pi_max = total.pi_max.cwiseMax(st.pi_max);
        for (const auto& [mask, count] : st.masks) total.masks[mask] += count;
    }

    SimulationReport rep;
    rep.num_draws = N;
    rep.seed = config.seed;
    rep.bins = config.bins;
    const double Nd = static_cast<double>(N);

    Vector s1 = Vector::Zero(n), s2 = Vector::Zero(n);
    for (const Batch& b : total.batches) {
        s1 += b.s1;
        s2 += b.s2;
    }
    rep.profit_mean = s1 / Nd;
    rep.profit_sd.resize(n);
    rep.profit_mean_se.resize(n);
    rep.profit_sd_se.resize(n);
    for (int k = 0; k < n; ++k) {
        const double var = N > 1 ? (s2(k) - Nd * rep.profit_mean(k) * rep.profit_mean(k)) / (Nd - 1.0) : 0.0;
        rep.profit_sd(k) = std::sqrt(std::max(0.0, var));
        std::vector<double> means, sds;
        for (const Batch& b : total.batches) {
            if (b.count < 2) continue;
            const double c = static_cast<double>(b.count);
            const double m = b.s1(k) / c;
            means.push_back(m);
            sds.push_back(std::sqrt(std::max(0.0, (b.s2(k) - c * m * m) / (c - 1.0))));
        }
        const double root = std::sqrt(static_cast<double>(std::max<std::size_t>(means.size(), 1)));
        rep.profit_mean_se(k) = stdev(means) / root;
        rep.profit_sd_se(k) = stdev(sds) / root;
    }

    rep.default_prob = total.defaults / Nd;
    rep.default_prob_se = (rep.default_prob.array() * (1.0 - rep.default_prob.array()) / Nd).sqrt().matrix();
    const auto iid_se = [&](const Vector& m1, const Vector& m2) {
        Vector mean = m1 / Nd;
        Vector var = (m2 / Nd - mean.cwiseAbs2()).cwiseMax(0.0) * (N > 1 ? Nd / (Nd - 1.0) : 0.0);
        return std::make_pair(mean, Vector((var / Nd).cwiseSqrt()));
    };
    std::tie(rep.tau_mean, rep.tau_mean_se) = iid_se(total.tau1, total.tau2);
    std::tie(rep.eps_mean, rep.eps_mean_se) = iid_se(total.eps1, total.eps2);
    rep.welfare_mean = total.w1 / Nd;
    rep.welfare_mean_se =
        std::sqrt(std::max(0.0, total.w2 / Nd - rep.welfare_mean * rep.welfare_mean) / std::max(1.0, Nd - 1.0));
    rep.welfare_bound_violations = total.violations;
    for (const auto& [mask, count] : total.masks) rep.cascade_prob[mask] = static_cast<double>(count) / Nd;

    // Second pass: histograms over the observed ranges.
    const int bins = config.bins;
    std::vector<std::vector<std::uint64_t>> counts(chunks);
    const auto slot = [&](int stat, int k, std::size_t b) {
        return (static_cast<std::size_t>(stat) * n + k) * static_cast<std::size_t>(bins) + b;
    };
    parallel_chunks(chunks, [&](std::size_t c) {
        std::vector<std::uint64_t>& cnt = counts[c];
        cnt.assign(3 * static_cast<std::size_t>(n) * bins, 0);
        for_each_draw(model, config, c, [&](std::uint64_t, const Vector& eta) {
            const Realization r = eval(eta);
            for (int k = 0; k < n; ++k) {
                ++cnt[slot(0, k, bin_of(r.tau(k), total.tau_min(k), total.tau_max(k), bins))];
                ++cnt[slot(1, k, bin_of(r.epsilon(k), total.eps_min(k), total.eps_max(k), bins))];
                ++cnt[slot(2, k, bin_of(r.profit(k), total.pi_min(k), total.pi_max(k), bins))];
            }
        });
    });
    rep.histograms.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        SectorHistograms& h = rep.histograms[static_cast<std::size_t>(k)];
        h.tau = make_histogram(total.tau_min(k), total.tau_max(k), bins);
        h.epsilon = make_histogram(total.eps_min(k), total.eps_max(k), bins);
        h.profit = make_histogram(total.pi_min(k), total.pi_max(k), bins);
        for (const auto& cnt : counts) {
            for (int b = 0; b < bins; ++b) {
                h.tau.counts[b] += cnt[slot(0, k, b)];
                h.epsilon.counts[b] += cnt[slot(1, k, b)];
                h.profit.counts[b] += cnt[slot(2, k, b)];
            }
        }
    }

    rep.zeta = base.profile.zeta;
    rep.xi = base.profile.xi;
    rep.y0 = base.equil.y0;
    rep.c0 = base.equil.c0;
    return rep;
}

DeltaTable compare_leverage(const SimulationReport& a, const SimulationReport& b) {
    if (a.zeta.size() != b.zeta.size() || a.default_prob.size() != b.default_prob.size())
        throw Error(ErrorCode::DimensionMismatch, "reports cover different sector counts");
    DeltaTable d;
    d.zeta = a.zeta - b.zeta;
    d.xi = a.xi - b.xi;
    d.y = a.y0 - b.y0;
    d.c = a.c0 - b.c0;
    d.default_prob = a.default_prob - b.default_prob;
    return d;
}

}  // namespace rigidnet
