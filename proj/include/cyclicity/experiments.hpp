#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cyclicity/coom.hpp"
#include "cyclicity/cyclic_lead.hpp"
#include "cyclicity/simulate.hpp"

namespace cyclicity {

using Config = nlohmann::json;

/// Rectangular numeric table with a JSON metadata object.  Serialized as CSV
/// with a single '#'-prefixed metadata line; the data section is byte-stable
/// for a fixed seed (wall time lives only in the metadata line).
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    Config metadata;
};

namespace detail {

inline std::string format_cell(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

inline std::string csv_data_section(const ResultTable& table) {
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << detail::format_cell(row[c]);
        os << "\n";
    }
    return os.str();
}

/// Atomic write: temp file in place, then rename.
inline void write_csv(const ResultTable& table, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("write_csv: cannot open " + tmp);
        out << "# " << table.metadata.dump() << "\n" << csv_data_section(table);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("write_csv: rename to " + path + " failed");
}

/// Worker cap: hardware concurrency, clamped by CYCLICITY_THREADS.
inline int thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("CYCLICITY_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < cap) cap = static_cast<int>(v);
    }
    return cap;
}

/// Index-parallel loop; each index owns its output slot, so results do not
/// depend on scheduling.
template <typename F>
void parallel_for(int count, F&& body) {
    const int workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

namespace experiments {

namespace detail {

inline Config base_metadata(const std::string& name) {
    Config meta;
    meta["experiment"] = name;
    meta["version"] = kVersion;
    meta["rng"] = kRngId;
    meta["gaussian"] = kGaussianId;
    meta["threads"] = thread_cap();
    return meta;
}

template <typename T>
T field_or(const Config& cfg, const std::string& key, const T& fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError("config field '" + key + "': " + e.what());
    }
}

inline double spectral_norm(const Matrix& b) {
    Eigen::JacobiSVD<Matrix> svd(b);
    return svd.singularValues()[0];
}

}  // namespace detail

/// |lambda_1(A_N) - 2/pi| over a range of sizes.
inline ResultTable lambda_limit(const Config& cfg) {
    const int n_min = detail::field_or(cfg, "n_min", 20);
    const int n_max = detail::field_or(cfg, "n_max", 24);
    if (n_min < 2 || n_max < n_min)
        throw InvalidInputError("lambda-limit: need 2 <= n_min <= n_max");
    ResultTable table;
    table.columns = {"N", "lambda1", "dist_two_over_pi"};
    for (int n = n_min; n <= n_max; ++n) {
        const double lam1 = hermitian_top_eigenpair(binomial_matrix(n)).value;
        table.rows.push_back({static_cast<double>(n), lam1, std::abs(lam1 - 2.0 / kPi)});
    }
    table.metadata = detail::base_metadata("lambda-limit");
    return table;
}

/// Largest eigenvalue of every principal minor of A_N.
inline ResultTable minors(const Config& cfg) {
    const int n = detail::field_or(cfg, "n", 10);
    if (n < 2) throw InvalidInputError("minors: need n >= 2");
    const ComplexMatrix a = binomial_matrix(n);
    ResultTable table;
    table.columns = {"j", "lambda1_minor"};
    for (int j = 1; j <= n; ++j) {
        const double lam = hermitian_top_eigenpair(ComplexMatrix(principal_minor(a, j))).value;
        table.rows.push_back({static_cast<double>(j), lam});
    }
    table.metadata = detail::base_metadata("minors");
    table.metadata["lambda1_full"] = hermitian_top_eigenpair(a).value;
    return table;
}

/// Row-(N-1) Gershgorin radius of A_N against the identity 1 - N/2^N.
inline ResultTable gershgorin(const Config& cfg) {
    const int n_min = detail::field_or(cfg, "n_min", 4);
    const int n_max = detail::field_or(cfg, "n_max", 64);
    if (n_min < 2 || n_max < n_min)
        throw InvalidInputError("gershgorin: need 2 <= n_min <= n_max");
    ResultTable table;
    table.columns = {"N", "radius_row_N_minus_1", "identity_value", "abs_difference"};
    for (int n = n_min; n <= n_max; ++n) {
        const Vector radii = gershgorin_radii(binomial_matrix(n));
        const double identity = 1.0 - n / std::pow(2.0, n);
        table.rows.push_back({static_cast<double>(n), radii[n - 2], identity,
                              std::abs(radii[n - 2] - identity)});
    }
    table.metadata = detail::base_metadata("gershgorin");
    return table;
}

/// SLLN convergence of the time-averaged empirical lead matrix toward Q for
/// a circulant friction matrix with identity volatility.
inline ResultTable slln_scatter(const Config& cfg) {
    const std::vector<double> first_row =
        detail::field_or<std::vector<double>>(cfg, "first_row", {2.1, -0.2, -0.4, -0.6, -0.8});
    const std::vector<int> k_list = detail::field_or<std::vector<int>>(
        cfg, "k_list", {100, 1000, 10000, 100000, 1000000});
    const double delta = detail::field_or(cfg, "delta", 0.01);
    const std::vector<std::uint64_t> seeds =
        detail::field_or<std::vector<std::uint64_t>>(cfg, "seeds", {1, 2, 3, 4, 5});
    const int n = static_cast<int>(first_row.size());
    if (n < 1) throw InvalidInputError("slln-scatter: first_row must be nonempty");

    CirculantSpec spec{Eigen::Map<const Vector>(first_row.data(), n)};
    OUParams params{dense(spec), Matrix::Identity(n, n)};
    const Matrix q = theoretical_lead_matrix(params.friction, diffusion_matrix(params)).matrix;
    const Matrix s = stationary_covariance(params.friction, diffusion_matrix(params)).matrix;

    std::vector<std::vector<SllnRow>> per_seed(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), [&](int i) {
        per_seed[i] = slln_experiment(params, k_list, delta, {seeds[i]}, &q, &s);
    });

    ResultTable table;
    table.columns = {"seed", "K", "delta", "relative_frobenius_error"};
    for (const auto& rows : per_seed)
        for (const SllnRow& r : rows)
            table.rows.push_back({static_cast<double>(r.seed), static_cast<double>(r.iterations),
                                  r.step, r.relative_error});
    table.metadata = detail::base_metadata("slln-scatter");
    table.metadata["seeds"] = seeds;
    table.metadata["step_spectral_product"] = delta * detail::spectral_norm(params.friction);
    return table;
}

/// Noise placement for the regime sweep.
struct NoiseSpec {
    enum class Kind { one, trailing, all } kind = Kind::one;
    int sensor = 0;    // for `one`
    int trailing = 0;  // for `trailing`
    double variance = 1.0;
};

namespace detail {

inline NoiseSpec parse_noise(const Config& cfg, int n) {
    NoiseSpec noise;
    const Config block = field_or<Config>(cfg, "noise", Config{{"kind", "one"}, {"sensor", n}});
    const std::string kind = field_or<std::string>(block, "kind", "one");
    noise.variance = field_or(block, "variance", 1.0);
    if (kind == "one") {
        noise.kind = NoiseSpec::Kind::one;
        noise.sensor = field_or(block, "sensor", n);
        if (noise.sensor < 1 || noise.sensor > n)
            throw InvalidInputError("regime-sweep: noise.sensor out of range 1..N");
    } else if (kind == "trailing") {
        noise.kind = NoiseSpec::Kind::trailing;
        noise.trailing = field_or(block, "trailing", 1);
        if (noise.trailing < 1 || noise.trailing > n)
            throw InvalidInputError("regime-sweep: noise.trailing out of range 1..N");
    } else if (kind == "all") {
        noise.kind = NoiseSpec::Kind::all;
    } else {
        throw InvalidInputError("regime-sweep: noise.kind must be one|trailing|all");
    }
    if (!(noise.variance > 0.0))
        throw InvalidInputError("regime-sweep: noise.variance must be positive");
    return noise;
}

inline Matrix volatility_for(const NoiseSpec& noise, int n) {
    const double amp = std::sqrt(2.0 * noise.variance);  // D = Sigma Sigma^T/2 = variance
    switch (noise.kind) {
        case NoiseSpec::Kind::one: {
            Matrix sigma = Matrix::Zero(n, 1);
            sigma(noise.sensor - 1, 0) = amp;
            return sigma;
        }
        case NoiseSpec::Kind::trailing: {
            Matrix sigma = Matrix::Zero(n, noise.trailing);
            for (int l = 0; l < noise.trailing; ++l) sigma(n - noise.trailing + l, l) = amp;
            return sigma;
        }
        case NoiseSpec::Kind::all:
        default:
            return amp * Matrix::Identity(n, n);
    }
}

}  // namespace detail

/// Sweep the perturbation over an explicit list: for each epsilon simulate a
/// realization, time-average the lead matrix, and record the eigenvalue
/// ratio plus the leading-eigenvector moduli/phases per component.
inline ResultTable regime_sweep(const Config& cfg) {
    const int n = detail::field_or(cfg, "n", 100);
    const int p = detail::field_or(cfg, "p", 2);
    const double b_p = detail::field_or(cfg, "b_p", -1.0);
    const std::vector<double> eps_list = detail::field_or<std::vector<double>>(
        cfg, "eps_list", {1e-11, 1e-10, 1e-1, 1.0, 1e3, 1e4});
    const int k = detail::field_or(cfg, "k", 1000001);
    const double delta = detail::field_or(cfg, "delta", 0.01);
    const std::uint64_t seed = detail::field_or<std::uint64_t>(cfg, "seed", 20240);
    const std::string init = detail::field_or<std::string>(cfg, "init", "zero");
    if (init != "zero" && init != "stationary")
        throw InvalidInputError("regime-sweep: init must be zero|stationary");
    const NoiseSpec noise = detail::parse_noise(cfg, n);
    if (eps_list.empty()) throw InvalidInputError("regime-sweep: eps_list must be nonempty");
    for (double eps : eps_list)
        if (!(eps > 0.0)) throw InvalidInputError("regime-sweep: every epsilon must be positive");

    struct SweepSlot {
        double epsilon = 0.0;
        double step = 0.0;
        double ratio = 0.0;
        double lambda1_modulus = 0.0;
        Vector moduli, phases;
    };
    std::vector<SweepSlot> slots(eps_list.size());

    parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
        PropagationNetwork net{n, p, b_p, eps_list[i]};
        const CirculantSpec friction = friction_spec(net);
        const Matrix sigma = detail::volatility_for(noise, n);
        OUParams params{dense(friction), sigma};
        // Strongly dissipative sweep points need a smaller step for the
        // forward-Euler bound step * max|eigenvalue| < 2; the effective step
        // per epsilon is emitted alongside the data.
        double radius = 0.0;
        for (int mode = 1; mode <= n; ++mode)
            radius = std::max(radius, std::abs(circulant_eigenvalue(friction, mode)));
        const double step = std::min(delta, 0.5 / radius);
        SimConfig sim;
        sim.iterations = k;
        sim.step = step;
        sim.seed = seed;
        LeadMatrix lead;
        if (init == "stationary") {
            // Spectral stationary covariance: valid at any positive margin,
            // so near-unstable sweep points do not hit the Lyapunov refusal.
            const Matrix s =
                cyclic_stationary_covariance(friction, diffusion_matrix(params)).matrix;
            sim.init = SimConfig::Init::stationary;
            lead = simulate_time_averaged_lead(params, sim, &s);
        } else {
            sim.init = SimConfig::Init::zero;
            lead = simulate_time_averaged_lead(params, sim);
        }
        const SkewSpectrum sp = skew_eigendecomposition(lead.matrix);
        slots[i] = {eps_list[i], step,
                    n >= 3 ? eigenvalue_ratio(lead.matrix)
                           : std::numeric_limits<double>::infinity(),
                    std::abs(sp.eigenvalues[0]), sp.moduli, sp.phases};
    });

    ResultTable table;
    table.columns = {"epsilon", "delta_effective", "lambda1_modulus", "ratio_l1_l3",
                     "component",   "modulus",     "phase"};
    for (const SweepSlot& slot : slots)
        for (int c = 1; c <= n; ++c)
            table.rows.push_back({slot.epsilon, slot.step, slot.lambda1_modulus, slot.ratio,
                                  static_cast<double>(c), slot.moduli[c - 1],
                                  slot.phases[c - 1]});
    table.metadata = detail::base_metadata("regime-sweep");
    table.metadata["seed"] = seed;
    table.metadata["k"] = k;
    table.metadata["delta"] = delta;
    PropagationNetwork probe{n, p, b_p, eps_list.front()};
    table.metadata["step_spectral_product"] =
        delta * detail::spectral_norm(dense(friction_spec(probe)));
    return table;
}

/// Sinusoid COOM network: lead matrix, leading-eigenvector structure, and
/// the recovered cyclic order against the ground-truth offsets.
inline ResultTable coom_demo(const Config& cfg) {
    const int n = detail::field_or(cfg, "n", 10);
    if (n < 2) throw InvalidInputError("coom-demo: need n >= 2");
    PeriodicCOOM model;
    model.period = 1.0;
    model.fourier[1] = Complex(0.0, -0.5);  // phi(t) = sin(2 pi t)
    model.scales = Vector::Ones(n);
    model.offsets = Vector::Zero(n);
    for (int i = 0; i < n; ++i) model.offsets[i] = static_cast<double>(i) / n;

    const LeadMatrix lead = coom_lead_matrix(model);
    const PhaseOrderReport report = phase_order_recovery(lead);
    const std::vector<int> expected = offset_cyclic_order(model.offsets, model.period);
    const RecoveryQuality quality = compare_cyclic_orders(report.order, expected);

    ResultTable table;
    table.columns = {"rank", "component", "modulus", "phase"};
    for (int r = 0; r < n; ++r) {
        const int comp = report.order[r];
        table.rows.push_back({static_cast<double>(r + 1), static_cast<double>(comp),
                              report.spectrum.moduli[comp - 1],
                              report.spectrum.phases[comp - 1]});
    }
    table.metadata = detail::base_metadata("coom-demo");
    table.metadata["dominance_ratio"] =
        std::isinf(report.dominance_ratio) ? Config("inf") : Config(report.dominance_ratio);
    table.metadata["order_matches_offsets"] = quality.matched;
    table.metadata["orientation"] = quality.reversed ? "conjugate" : "direct";
    return table;
}

/// Measured-vs-conjectured observations for the binomial-matrix family.
inline ResultTable conjecture_report(const Config& cfg) {
    std::vector<int> sizes;
    if (cfg.contains("sizes")) {
        sizes = detail::field_or<std::vector<int>>(cfg, "sizes", {});
    } else {
        const int n_max = detail::field_or(cfg, "n_max", 64);
        if (n_max < 3 || n_max > 64)
            throw InvalidInputError("conjecture-report: n_max must lie in 3..64");
        // N = 2 is the exactly-degenerate pair (equal moduli), so the
        // default sweep starts at 3.
        for (int n = 3; n <= n_max; ++n) sizes.push_back(n);
    }
    const std::vector<ConjectureObservation> obs = numeric_conjecture_checks(sizes);

    ResultTable table;
    table.columns = {"check_id", "parameter", "measured", "conjectured", "satisfied"};
    Config names = Config::object();
    std::vector<std::string> seen;
    for (const ConjectureObservation& o : obs) {
        int id = -1;
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i] == o.quantity) id = static_cast<int>(i);
        if (id < 0) {
            id = static_cast<int>(seen.size());
            seen.push_back(o.quantity);
            names[std::to_string(id)] = o.quantity;
        }
        table.rows.push_back({static_cast<double>(id), o.parameter, o.measured, o.conjectured,
                              o.satisfied ? 1.0 : 0.0});
    }
    table.metadata = detail::base_metadata("conjecture-report");
    table.metadata["check_names"] = names;
    bool all_pass = true;
    for (const ConjectureObservation& o : obs) all_pass = all_pass && o.satisfied;
    table.metadata["all_satisfied"] = all_pass;
    return table;
}

/// Dispatch by experiment name; throws InvalidInputError for unknown names
/// or invalid configs (CLI exit code 2) and other errors for numerical
/// failures (exit code 3).
inline ResultTable run(const std::string& name, const Config& cfg) {
    const auto started = std::chrono::steady_clock::now();
    ResultTable table;
    if (name == "lambda-limit") table = lambda_limit(cfg);
    else if (name == "minors") table = minors(cfg);
    else if (name == "gershgorin") table = gershgorin(cfg);
    else if (name == "slln-scatter") table = slln_scatter(cfg);
    else if (name == "regime-sweep") table = regime_sweep(cfg);
    else if (name == "coom-demo") table = coom_demo(cfg);
    else if (name == "conjecture-report") table = conjecture_report(cfg);
    else throw InvalidInputError("unknown experiment '" + name + "'");
    table.metadata["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              started)
            .count();
    return table;
}

}  // namespace experiments
}  // namespace cyclicity
