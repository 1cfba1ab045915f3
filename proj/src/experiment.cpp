#include "trotter_shuffle/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "trotter_shuffle/concentration.hpp"
#include "trotter_shuffle/csv.hpp"
#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/evolution.hpp"
#include "trotter_shuffle/row_io.hpp"
#include "trotter_shuffle/words.hpp"

namespace trotter_shuffle {

using nlohmann::json;

namespace {

    // --- enum <-> string --------------------------------------------------------

    template<class E>
    struct Names {
        std::vector<std::pair<E, const char *>> entries;

        E parse(const std::string &field, const std::string &s) const {
            for(const auto &[e, name] : entries)
                if(s == name) return e;
            std::string allowed;
            for(const auto &[e, name] : entries) allowed += (allowed.empty() ? "" : "|") + std::string(name);
            throw ConfigError(field + ": unknown value '" + s + "' (expected " + allowed + ")");
        }
        const char *name(E e) const {
            for(const auto &[v, n] : entries)
                if(v == e) return n;
            return "?";
        }
    };

    const Names<ExperimentKind> kind_names{{{ExperimentKind::converge, "converge"},
                                            {ExperimentKind::tail, "tail"},
                                            {ExperimentKind::regime, "regime"},
                                            {ExperimentKind::words, "words"},
                                            {ExperimentKind::evolution, "evolution"}}};
    const Names<SigmaMode>      sigma_names{{{SigmaMode::random, "random"}, {SigmaMode::identity, "identity"}}};
    const Names<BlockMode>      block_names{
        {{BlockMode::probability, "probability"}, {BlockMode::almost_sure, "almost_sure"}, {BlockMode::sqrt_default, "sqrt_default"}}};
    const Names<Regime> regime_names{{{Regime::prob_regime, "prob_regime"},
                                      {Regime::as_regime, "as_regime"},
                                      {Regime::large_Linf, "large_Linf"},
                                      {Regime::bounded_log, "bounded_log"},
                                      {Regime::intermediate, "intermediate"}}};
    const Names<SamplingMode>   mode_names{{{SamplingMode::ordered, "ordered"}, {SamplingMode::permuted, "permuted"}, {SamplingMode::iid, "iid"}}};
    const Names<TwoLetterOrder> order_names{{{TwoLetterOrder::first_half_B, "first_half_B"}, {TwoLetterOrder::interleaved, "interleaved"}}};
    const Names<TailMode>       tail_names{{{TailMode::identity_fill, "identity_fill"}, {TailMode::repeat_first, "repeat_first"}}};
    const Names<RemainderMode>  remainder_names{{{RemainderMode::random_unit, "random_unit"}, {RemainderMode::zero, "zero"}}};

    template<class T>
    T get_field(const json &obj, const std::string &prefix, const char *key, T fallback) {
        auto it = obj.find(key);
        if(it == obj.end() || it->is_null()) return fallback;
        try {
            return it->get<T>();
        } catch(const json::exception &e) {
            throw ConfigError(prefix + key + ": " + e.what());
        }
    }

    std::uint64_t get_count(const json &obj, const std::string &prefix, const char *key, std::uint64_t fallback) {
        auto it = obj.find(key);
        if(it == obj.end() || it->is_null()) return fallback;
        if(!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0))
            throw ConfigError(prefix + key + ": expected a non-negative integer");
        return it->get<std::uint64_t>();
    }

    // --- generators -------------------------------------------------------------

    enum class GenName { constant, diagonal, two_letter, repeated, random_unit, random_ball, spiked, riemann };
    const Names<GenName> gen_names{{{GenName::constant, "constant"},
                                    {GenName::diagonal, "diagonal"},
                                    {GenName::two_letter, "two_letter"},
                                    {GenName::repeated, "repeated"},
                                    {GenName::random_unit, "random_unit"},
                                    {GenName::random_ball, "random_ball"},
                                    {GenName::spiked, "spiked"},
                                    {GenName::riemann, "riemann"}}};

    struct GeneratorSpec {
        GenName              name = GenName::constant;
        CMatrix              matrix, B, C;
        TwoLetterOrder       order = TwoLetterOrder::first_half_B;
        std::vector<CMatrix> letters;
        std::size_t          letter_count = 0;
        TailMode             tail         = TailMode::identity_fill;
        RegimeSpec           regime;
        SpikedOptions        spiked;
        CatalogFunction      fn;
        SamplingMode         mode       = SamplingMode::ordered;
        bool                 unit_bound = false;

        bool varies_per_trial() const {
            switch(name) {
                case GenName::constant:
                case GenName::two_letter: return false;
                case GenName::repeated: return letters.empty();
                case GenName::riemann: return mode != SamplingMode::ordered;
                default: return true;
            }
        }
    };

    CMatrix matrix_field(const json &g, const char *key, Eigen::Index d, const char *fallback = nullptr) {
        auto it = g.find(key);
        if(it == g.end()) {
            if(fallback) return matrix_from_json(fallback, d);
            throw ConfigError(std::string("generator.") + key + ": required");
        }
        try {
            CMatrix M = matrix_from_json(*it, d);
            if(M.rows() != d) throw ConfigError(std::string("generator.") + key + ": dimension differs from d");
            return M;
        } catch(const InvalidInput &e) {
            throw ConfigError(std::string("generator.") + key + ": " + e.what());
        }
    }

    GeneratorSpec parse_generator(const json &g, Eigen::Index d) {
        if(!g.is_object() || !g.contains("name") || !g.at("name").is_string())
            throw ConfigError("generator: expected an object with a string 'name'");
        const std::string p = "generator.";
        GeneratorSpec     spec;
        spec.name       = gen_names.parse("generator.name", g.at("name").get<std::string>());
        spec.unit_bound = get_field<bool>(g, p, "unit_bound", false);
        switch(spec.name) {
            case GenName::constant: spec.matrix = matrix_field(g, "matrix", d); break;
            case GenName::two_letter:
                spec.B     = matrix_field(g, "B", d, "E12");
                spec.C     = matrix_field(g, "C", d, "E21");
                spec.order = order_names.parse("generator.order", get_field<std::string>(g, p, "order", "first_half_B"));
                break;
            case GenName::repeated:
                if(auto it = g.find("letters"); it != g.end()) {
                    if(!it->is_array() || it->empty()) throw ConfigError("generator.letters: expected a non-empty array");
                    for(const auto &l : *it) {
                        try {
                            spec.letters.push_back(matrix_from_json(l, d));
                        } catch(const InvalidInput &e) { throw ConfigError(std::string("generator.letters: ") + e.what()); }
                    }
                } else {
                    spec.letter_count = get_count(g, p, "a_n", 0);
                    if(spec.letter_count < 1) throw ConfigError("generator: repeated needs 'letters' or a positive 'a_n'");
                }
                spec.tail = tail_names.parse("generator.tail", get_field<std::string>(g, p, "tail", "identity_fill"));
                break;
            case GenName::spiked: {
                spec.regime.regime = regime_names.parse("generator.regime", get_field<std::string>(g, p, "regime", "prob_regime"));
                spec.regime.delta  = get_field<double>(g, p, "delta", 0.1);
                spec.regime.alpha  = get_field<double>(g, p, "alpha", 0.5);
                spec.regime.beta   = get_field<double>(g, p, "beta", 0.0);
                spec.regime.t      = get_field<double>(g, p, "t", 1.0);
                if(g.contains("linf")) spec.regime.linf = get_field<double>(g, p, "linf", 1.0);
                spec.spiked.d         = d;
                spec.spiked.remainder = remainder_names.parse("generator.remainder", get_field<std::string>(g, p, "remainder", "random_unit"));
                spec.spiked.fixed_direction = get_field<bool>(g, p, "fixed_direction", false);
                try {
                    spec.regime.validate();
                } catch(const InvalidInput &e) { throw ConfigError(std::string("generator: ") + e.what()); }
                break;
            }
            case GenName::riemann: {
                const auto fn_name = get_field<std::string>(g, p, "fn", "step");
                CMatrix    first, second;
                if(fn_name == "constant") first = matrix_field(g, "A", d);
                else if(fn_name == "linear_diagonal") first = matrix_field(g, "D", d);
                else if(fn_name == "step") {
                    first  = matrix_field(g, "B", d, "E12");
                    second = matrix_field(g, "C", d, "E21");
                } else if(fn_name == "rotation") {
                    first  = matrix_field(g, "X", d, d == 2 ? "sigma_x" : "E12");
                    second = matrix_field(g, "Z", d, d == 2 ? "sigma_z" : "E21");
                }
                try {
                    spec.fn = CatalogFunction::parse(fn_name, first, second);
                } catch(const InvalidInput &e) { throw ConfigError(std::string("generator.fn: ") + e.what()); }
                spec.mode = mode_names.parse("generator.mode", get_field<std::string>(g, p, "mode", "ordered"));
                break;
            }
            case GenName::diagonal:
            case GenName::random_unit:
            case GenName::random_ball: break;
        }
        return spec;
    }

    ArrayRow build_from_spec(const GeneratorSpec &spec, const ExperimentConfig &config, std::size_t n, std::size_t trial) {
        auto          rng      = make_stream(config.seed, n, trial, StreamTag::generator);
        std::uint64_t gen_seed = rng();
        const auto    d        = config.d;
        auto          per_element = [&](auto &&draw) {
            std::vector<CMatrix> elements;
            elements.reserve(n);
            for(std::size_t i = 0; i < n; ++i) elements.push_back(draw());
            return ArrayRow::from_elements(std::move(elements));
        };

        std::optional<ArrayRow> row;
        switch(spec.name) {
            case GenName::constant: row = ArrayRow::from_letters({spec.matrix}, std::vector<std::size_t>(n, 0)); break;
            case GenName::diagonal: row = per_element([&] { return random_diagonal(d, rng); }); break;
            case GenName::two_letter: row = gen_two_letter(n, spec.B, spec.C, spec.order); break;
            case GenName::repeated: {
                auto letters = spec.letters;
                for(std::size_t i = 0; i < spec.letter_count; ++i) letters.push_back(random_hermitian_unit(d, rng));
                row = gen_repeated(letters, n, spec.tail);
                break;
            }
            case GenName::random_unit: row = per_element([&] { return random_hermitian_unit(d, rng); }); break;
            case GenName::random_ball: row = per_element([&] { return random_in_unit_ball(d, rng); }); break;
            case GenName::spiked: row = gen_spiked(n, spec.regime, gen_seed, spec.spiked).row; break;
            case GenName::riemann: row = gen_riemann(spec.fn.as_function(), n, spec.mode, gen_seed); break;
        }
        return spec.unit_bound ? clamp_unit_norm(*row) : std::move(*row);
    }

    // --- execution helpers --------------------------------------------------------

    void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &body) {
        threads = std::max<std::size_t>(1, std::min(threads, count));
        if(threads == 1) {
            for(std::size_t i = 0; i < count; ++i) body(i);
            return;
        }
        std::vector<std::thread>        pool;
        std::vector<std::exception_ptr> errors(threads);
        for(std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for(std::size_t i = w; i < count; i += threads) body(i);
                } catch(...) { errors[w] = std::current_exception(); }
            });
        for(auto &th : pool) th.join();
        for(auto &e : errors)
            if(e) std::rethrow_exception(e);
    }

    Permutation draw_sigma(const ExperimentConfig &config, std::size_t n, std::size_t trial) {
        if(config.sigma_mode == SigmaMode::identity) return Permutation::identity(n);
        auto rng = make_stream(config.seed, n, trial, StreamTag::permutation);
        return uniform_permutation(n, rng);
    }

    std::size_t ceil_sqrt(std::size_t n) {
        auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
        while(r * r < n) ++r;
        while(r > 0 && (r - 1) * (r - 1) >= n) --r;
        return r;
    }

    Cell num(std::size_t v) { return static_cast<std::int64_t>(v); }

    void summarize(ExperimentReport &rep, const std::string &metric) {
        const auto ns     = rep.records.column("n");
        const auto values = rep.records.column(metric);
        for(auto n : rep.config.n_list) {
            std::vector<double> sel;
            for(std::size_t i = 0; i < ns.size(); ++i)
                if(static_cast<std::size_t>(ns[i]) == n && std::isfinite(values[i])) sel.push_back(values[i]);
            if(sel.empty()) continue;
            rep.summary.push_back({n, metric, quantile(sel, 0.5), quantile(sel, 0.05), quantile(sel, 0.95)});
        }
    }

    // --- kinds --------------------------------------------------------------------

    void run_converge(ExperimentReport &rep, const GeneratorSpec &spec) {
        const auto &cfg = rep.config;
        rep.records.header = {"n", "trial", "sup_dev", "final_dev", "slack", "target_sup_dev", "target_final_dev",
                              "l1", "linf", "norm_mean", "tropp_ward"};
        Table paths{"paths", {"n", "trial", "k", "deviation", "sup_dev", "slack"}, {}};
        std::optional<CMatrix> target;
        if(cfg.target) target = matrix_from_json(*cfg.target, cfg.d);

        for(auto n : cfg.n_list) {
            struct Cached {
                ArrayRow                     row;
                RowStats                     stats;
                PathEvaluator                to_mean;
                std::optional<PathEvaluator> to_target;
            };
            auto make_cached = [&](std::size_t trial) {
                auto row   = build_from_spec(spec, cfg, n, trial);
                auto stats = row_stats(row);
                PathEvaluator                to_mean(row, stats.mean);
                std::optional<PathEvaluator> to_target;
                if(target) to_target.emplace(row, *target);
                return Cached{std::move(row), std::move(stats), std::move(to_mean), std::move(to_target)};
            };
            std::optional<Cached> shared;
            if(!spec.varies_per_trial()) shared.emplace(make_cached(0));

            std::vector<std::vector<Cell>>              rows(cfg.trials);
            std::vector<std::vector<std::vector<Cell>>> path_rows(cfg.trials);
            parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
                std::optional<Cached> local;
                if(!shared) local.emplace(make_cached(trial));
                const Cached &c     = shared ? *shared : *local;
                const auto    sigma = draw_sigma(cfg, n, trial);
                const auto    rep_m = c.to_mean.evaluate(sigma);
                Cell          t_sup, t_fin;
                if(c.to_target) {
                    const auto rep_t = c.to_target->evaluate(sigma);
                    t_sup            = rep_t.sup_dev;
                    t_fin            = rep_t.final_deviation();
                }
                const double nm = matlin::op_norm(c.stats.mean);
                rows[trial]     = {num(n),          num(trial), rep_m.sup_dev, rep_m.final_deviation(), rep_m.slack, t_sup, t_fin,
                                   c.stats.l1,      c.stats.linf, nm,
                                   tropp_ward_rate(n, c.stats, nm, c.row.d(), 0.05)};
                const double      points = static_cast<double>(cfg.path_points - 1);
                std::size_t       last   = static_cast<std::size_t>(-1);
                for(std::size_t m = 0; m < cfg.path_points; ++m) {
                    const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(m) * static_cast<double>(n) / points));
                    if(k == last) continue;
                    last = k;
                    path_rows[trial].push_back({num(n), num(trial), num(k), rep_m.deviations[k], Cell{}, Cell{}});
                }
                path_rows[trial].push_back({num(n), num(trial), Cell{}, rep_m.max_deviation(), rep_m.sup_dev, rep_m.slack});
            });
            for(auto &r : rows) rep.records.rows.push_back(std::move(r));
            for(auto &pr : path_rows)
                for(auto &r : pr) paths.rows.push_back(std::move(r));
        }
        rep.extra.push_back(std::move(paths));
        summarize(rep, "sup_dev");
        summarize(rep, "final_dev");
    }

    void run_tail(ExperimentReport &rep, const GeneratorSpec &spec) {
        const auto &cfg    = rep.config;
        rep.records.header = {"n", "trial", "a_n", "b_n", "mean_gap", "norm_gap"};
        Table tail{"tail",
                   {"n", "eps", "empirical_freq", "bernstein_bound", "lemma_bound", "trials", "empirical_norm_freq", "scalar_lemma_bound"},
                   {}};
        for(auto n : cfg.n_list) {
            const auto row    = build_from_spec(spec, cfg, n, 0);
            const auto stats  = row_stats(row);
            const auto scheme = cfg.a_n ? BlockScheme::for_row(n, *cfg.a_n) : choose_blocks(n, stats, cfg.block_mode);
            const auto samples = sample_block_gaps(row, scheme, cfg.trials, cfg.seed);
            for(std::size_t t = 0; t < samples.size(); ++t)
                rep.records.rows.push_back({num(n), num(t), num(scheme.a_n), num(scheme.b_n), samples[t].mean_gap, samples[t].norm_gap});
            if(!(3.0 * stats.l1 > 0.05)) continue; // eps grid is empty
            const auto grid = eps_grid(stats.l1, cfg.tail_points);
            for(const auto &c : compare_tail(row, scheme, grid, samples))
                tail.rows.push_back({num(n), c.eps, c.empirical_freq, c.bernstein_bound, c.lemma_bound, num(c.trials), c.empirical_norm_freq,
                                     c.scalar_lemma_bound});
        }
        rep.extra.push_back(std::move(tail));
        summarize(rep, "mean_gap");
    }

    void run_regime(ExperimentReport &rep, const GeneratorSpec &spec) {
        const auto &cfg = rep.config;
        if(spec.name != GenName::spiked) throw ConfigError("generator.name: kind 'regime' needs the 'spiked' generator");
        rep.records.header = {"n", "trial", "regime", "k_n", "k_raw", "linf", "l1", "predicted_l1", "norm_mean", "sup_dev"};
        for(auto n : cfg.n_list) {
            std::vector<std::vector<Cell>> rows(cfg.trials);
            parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
                auto          rng = make_stream(cfg.seed, n, trial, StreamTag::generator);
                const auto    out = gen_spiked(n, spec.regime, rng(), spec.spiked);
                const auto    stats = row_stats(out.row);
                Cell          sup;
                if(cfg.products) sup = PathEvaluator(out.row, stats.mean).evaluate(draw_sigma(cfg, n, trial)).sup_dev;
                const double predicted = static_cast<double>(out.params.k_n) / static_cast<double>(n) * out.params.linf;
                rows[trial] = {num(n), num(trial), std::string(regime_names.name(spec.regime.regime)), num(out.params.k_n), out.params.k_raw,
                               out.params.linf, stats.l1, predicted, matlin::op_norm(stats.mean), sup};
            });
            for(auto &r : rows) rep.records.rows.push_back(std::move(r));
        }
        summarize(rep, cfg.products ? "sup_dev" : "l1");
    }

    void run_words(ExperimentReport &rep) {
        const auto &cfg    = rep.config;
        rep.records.header = {"n", "trial", "a_n", "b_n", "tau", "distance", "distance_bound", "within_bound"};
        Table tau_table{"tau", {"n", "p", "empirical_freq", "exact_bound", "asymptotic_bound", "trials"}, {}};
        for(auto n : cfg.n_list) {
            const std::size_t a = cfg.a_n.value_or(ceil_sqrt(n));
            if(a < 1 || a > n) throw ConfigError("a_n: must lie in [1, n] for n = " + std::to_string(n));
            const std::size_t   b  = n / a;
            const double        nn = static_cast<double>(n);
            std::vector<double> taus(cfg.trials);
            std::vector<std::vector<Cell>> rows(cfg.trials);
            parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
                const auto w    = restrict_word(draw_sigma(cfg, n, trial), n, a, b);
                const auto dist = transposition_distance(w);
                taus[trial]     = tau(w);
                rows[trial]     = {num(n), num(trial), num(a), num(b), taus[trial], static_cast<std::int64_t>(dist),
                                   nn * nn * taus[trial], static_cast<std::int64_t>(within_transposition_bound(w, n))};
            });
            for(auto &r : rows) rep.records.rows.push_back(std::move(r));

            const double p_max = (static_cast<double>(b) + 1.0) / std::sqrt(static_cast<double>(b));
            std::vector<double> grid = cfg.p_grid;
            if(grid.empty())
                for(int k = 1; k <= 6; ++k) grid.push_back(p_max * k / 6.0);
            for(double p : grid) {
                if(p > p_max * (1.0 + 1e-12))
                    throw ConfigError("p_grid: value " + csv::num(p) + " exceeds (b_n + 1)/sqrt(b_n) = " + csv::num(p_max) +
                                      " for n = " + std::to_string(n));
                const double threshold = p / std::sqrt(static_cast<double>(b));
                const auto   hits      = std::count_if(taus.begin(), taus.end(), [&](double t) { return t > threshold; });
                const double pc        = std::min(p, p_max);
                tau_table.rows.push_back({num(n), p, static_cast<double>(hits) / static_cast<double>(cfg.trials), tau_tail_bound(a, b, pc, true),
                                          tau_tail_bound(a, b, pc, false), num(cfg.trials)});
            }
        }
        rep.extra.push_back(std::move(tau_table));
        summarize(rep, "tau");
    }

    void run_evolution(ExperimentReport &rep, const GeneratorSpec &spec) {
        const auto &cfg = rep.config;
        if(spec.name != GenName::riemann) throw ConfigError("generator.name: kind 'evolution' needs the 'riemann' generator");
        rep.records.header = {"n", "trial", "mode", "dev_averaged", "dev_ordered", "cocycle_residual", "l1", "linf"};
        const auto fn      = spec.fn.as_function();
        const auto ordered = spec.fn.ordered_limit(cfg.s, cfg.t);
        const double r     = 0.5 * (cfg.s + cfg.t);
        for(auto n : cfg.n_list) {
            const CMatrix averaged = matlin::mat_exp((cfg.t - cfg.s) * riemann_integral(fn, 4 * n));
            std::vector<std::vector<Cell>> rows(cfg.trials);
            parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
                const auto    row   = build_from_spec(spec, cfg, n, trial);
                const auto    stats = row_stats(row);
                const CMatrix U     = propagate_row(row, cfg.s, cfg.t);
                Cell          dev_ordered;
                if(ordered) dev_ordered = matlin::op_norm(U - *ordered);
                const double cocycle = matlin::op_norm(propagate_row(row, cfg.s, r) * propagate_row(row, r, cfg.t) - U);
                rows[trial] = {num(n), num(trial), std::string(mode_names.name(spec.mode)), matlin::op_norm(U - averaged), dev_ordered, cocycle,
                               stats.l1, stats.linf};
            });
            for(auto &row : rows) rep.records.rows.push_back(std::move(row));
        }
        summarize(rep, "dev_averaged");
    }

    std::string cell_text(const Cell &c) {
        return std::visit(
            [](const auto &v) -> std::string {
                using T = std::decay_t<decltype(v)>;
                if constexpr(std::is_same_v<T, std::monostate>) return "";
                else if constexpr(std::is_same_v<T, double>) return csv::num(v);
                else if constexpr(std::is_same_v<T, std::int64_t>) return std::to_string(v);
                else return v;
            },
            c);
    }

    std::filesystem::path sibling(const std::filesystem::path &out, const std::string &suffix) {
        auto stem = out.stem().string();
        return out.parent_path() / (stem + suffix);
    }

    void write_file(const std::filesystem::path &path, const std::string &content) {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if(!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        os << content;
        os.flush();
        if(!os) throw std::runtime_error("write failed for '" + path.string() + "'");
    }

} // namespace

const char *to_string(ExperimentKind kind) { return kind_names.name(kind); }

// --- config -----------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const json &doc) {
    if(!doc.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known{"kind",   "n_list",      "d",   "trials",      "seed",   "eps",      "generator",
                                             "sigma_mode", "block_mode", "out_path", "target", "path_points", "a_n",    "tail_points",
                                             "p_grid", "s",           "t",   "products",    "threads"};
    for(const auto &[key, value] : doc.items())
        if(!known.count(key)) throw ConfigError(key + ": unknown field");

    ExperimentConfig c;
    const std::string p;
    if(!doc.contains("kind")) throw ConfigError("kind: required");
    c.kind = kind_names.parse("kind", get_field<std::string>(doc, p, "kind", ""));

    if(auto it = doc.find("n_list"); it != doc.end()) {
        if(!it->is_array()) throw ConfigError("n_list: expected an array of positive integers");
        for(const auto &v : *it) {
            if(!v.is_number_integer() || v.get<std::int64_t>() < 1) throw ConfigError("n_list: entries must be positive integers");
            c.n_list.push_back(v.get<std::size_t>());
        }
    }
    c.d      = static_cast<Eigen::Index>(get_count(doc, p, "d", 2));
    c.trials = get_count(doc, p, "trials", 1);
    c.seed   = get_count(doc, p, "seed", 0);
    c.eps    = get_field<double>(doc, p, "eps", 0.1);
    if(auto it = doc.find("generator"); it != doc.end()) c.generator = *it;
    c.sigma_mode = sigma_names.parse("sigma_mode", get_field<std::string>(doc, p, "sigma_mode", "random"));
    c.block_mode = block_names.parse("block_mode", get_field<std::string>(doc, p, "block_mode", "sqrt_default"));
    c.out_path   = get_field<std::string>(doc, p, "out_path", "");
    if(auto it = doc.find("target"); it != doc.end() && !it->is_null()) c.target = *it;
    c.path_points = get_count(doc, p, "path_points", 101);
    if(auto it = doc.find("a_n"); it != doc.end() && !it->is_null()) c.a_n = get_count(doc, p, "a_n", 0);
    c.tail_points = get_count(doc, p, "tail_points", 12);
    c.p_grid      = get_field<std::vector<double>>(doc, p, "p_grid", {});
    c.s           = get_field<double>(doc, p, "s", 0.0);
    c.t           = get_field<double>(doc, p, "t", 1.0);
    c.products    = get_field<bool>(doc, p, "products", true);
    c.threads     = get_count(doc, p, "threads", 1);
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json doc{{"kind", kind_names.name(kind)},
             {"n_list", n_list},
             {"d", d},
             {"trials", trials},
             {"seed", seed},
             {"eps", eps},
             {"generator", generator},
             {"sigma_mode", sigma_names.name(sigma_mode)},
             {"block_mode", block_names.name(block_mode)},
             {"out_path", out_path.generic_string()},
             {"path_points", path_points},
             {"tail_points", tail_points},
             {"p_grid", p_grid},
             {"s", s},
             {"t", t},
             {"products", products},
             {"threads", threads}};
    if(target) doc["target"] = *target;
    if(a_n) doc["a_n"] = *a_n;
    return doc;
}

void ExperimentConfig::validate() const {
    if(n_list.empty()) throw ConfigError("n_list: must be non-empty");
    for(auto n : n_list)
        if(n < 1) throw ConfigError("n_list: entries must be positive");
    if(trials < 1) throw ConfigError("trials: must be at least 1");
    if(d < 1) throw ConfigError("d: must be at least 1");
    if(!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps: must be positive");
    if(path_points < 2) throw ConfigError("path_points: must be at least 2");
    if(tail_points < 1) throw ConfigError("tail_points: must be at least 1");
    if(threads < 1) throw ConfigError("threads: must be at least 1");
    if(!(0.0 <= s && s <= t && t <= 1.0)) throw ConfigError("s, t: need 0 <= s <= t <= 1");
    for(double p : p_grid)
        if(!(p > 0.0)) throw ConfigError("p_grid: values must be positive");
    if(a_n && *a_n < 1) throw ConfigError("a_n: must be positive");
    if(target) {
        try {
            if(matrix_from_json(*target, d).rows() != d) throw ConfigError("target: dimension differs from d");
        } catch(const InvalidInput &e) { throw ConfigError(std::string("target: ") + e.what()); }
    }

    if(kind == ExperimentKind::words) return; // words draw permutations only
    if(generator.is_null() || (generator.is_object() && generator.empty())) throw ConfigError("generator: required for this kind");
    const auto spec = parse_generator(generator, d);
    if(spec.name == GenName::two_letter)
        for(auto n : n_list)
            if(n % 2) throw ConfigError("n_list: two_letter generator needs even n, got " + std::to_string(n));
    if(kind == ExperimentKind::tail || kind == ExperimentKind::converge)
        for(auto n : n_list)
            if(n < 4 && !a_n) throw ConfigError("n_list: block selection needs n >= 4");
    if(kind == ExperimentKind::regime && spec.name != GenName::spiked) throw ConfigError("generator.name: kind 'regime' needs 'spiked'");
    if(kind == ExperimentKind::evolution && spec.name != GenName::riemann)
        throw ConfigError("generator.name: kind 'evolution' needs 'riemann'");
}

// --- report -------------------------------------------------------------------------

std::vector<double> Table::column(const std::string &name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if(it == header.end()) throw std::out_of_range("no column '" + name + "'");
    const auto          idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for(const auto &r : rows) {
        const auto &c = r.at(idx);
        if(auto d = std::get_if<double>(&c)) out.push_back(*d);
        else if(auto i = std::get_if<std::int64_t>(&c)) out.push_back(static_cast<double>(*i));
        else out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

const Table *ExperimentReport::find_extra(const std::string &suffix) const {
    for(const auto &t : extra)
        if(t.suffix == suffix) return &t;
    return nullptr;
}

ArrayRow build_row(const ExperimentConfig &config, std::size_t n, std::size_t trial) {
    return build_from_spec(parse_generator(config.generator, config.d), config, n, trial);
}

ExperimentReport run(const ExperimentConfig &config) {
    config.validate();
    ExperimentReport rep;
    rep.config         = config;
    rep.records.suffix = "";
    switch(config.kind) {
        case ExperimentKind::converge: run_converge(rep, parse_generator(config.generator, config.d)); break;
        case ExperimentKind::tail: run_tail(rep, parse_generator(config.generator, config.d)); break;
        case ExperimentKind::regime: run_regime(rep, parse_generator(config.generator, config.d)); break;
        case ExperimentKind::words: run_words(rep); break;
        case ExperimentKind::evolution: run_evolution(rep, parse_generator(config.generator, config.d)); break;
    }
    return rep;
}

void write_csv(std::ostream &os, const Table &table) {
    for(std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for(const auto &r : table.rows) {
        for(std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
        os << '\n';
    }
}

void emit(const ExperimentReport &report, const std::filesystem::path &out_path) {
    if(out_path.empty()) throw std::runtime_error("emit: no output path");
    if(out_path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(out_path.parent_path(), ec);
        if(ec) throw std::runtime_error("cannot create directory '" + out_path.parent_path().string() + "': " + ec.message());
    }
    auto table_text = [](const Table &t) {
        std::ostringstream os;
        write_csv(os, t);
        return os.str();
    };
    write_file(out_path, table_text(report.records));

    json extra = json::object();
    for(const auto &t : report.extra) {
        const auto path = sibling(out_path, "." + t.suffix + ".csv");
        write_file(path, table_text(t));
        extra[t.suffix] = {{"file", path.filename().string()}, {"columns", t.header}};
    }
    json summary = json::array();
    for(const auto &s : report.summary)
        summary.push_back({{"n", s.n}, {"metric", s.metric}, {"median", s.median}, {"p05", s.p05}, {"p95", s.p95}});

    json sidecar{{"schema_version", schema_version},
                 {"kind", to_string(report.config.kind)},
                 {"columns", report.records.header},
                 {"extra_tables", extra},
                 {"config", report.config.to_json()},
                 {"summary", summary},
                 {"provenance", {{"seed", report.config.seed}, {"version", version}, {"records", report.records.rows.size()}}}};
    write_file(sibling(out_path, ".json"), sidecar.dump(2) + "\n");
}

double quantile(std::vector<double> values, double q) {
    if(values.empty()) throw InvalidInput("quantile: no values");
    std::sort(values.begin(), values.end());
    const double pos  = q * static_cast<double>(values.size() - 1);
    const auto   lo   = static_cast<std::size_t>(std::floor(pos));
    const auto   hi   = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace trotter_shuffle
