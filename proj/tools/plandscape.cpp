// plandscape: command-line front end for the planted clique landscape tools.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plandscape/errors.hpp"
#include "plandscape/flatness.hpp"
#include "plandscape/landscape.hpp"
#include "plandscape/mcmc.hpp"
#include "plandscape/model.hpp"
#include "plandscape/numerics.hpp"
#include "plandscape/ogp.hpp"
#include "plandscape/parallel.hpp"
#include "plandscape/serialize.hpp"

namespace {

using namespace plandscape;
using Json = nlohmann::ordered_json;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kRefuted = 3,
    kNotCertifiable = 4,
    kBudget = 5,
    kDomain = 6,
};

struct Common {
    std::uint64_t n = 14;
    std::uint64_t k = 4;
    std::uint64_t kbar = 5;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::string graph;
    unsigned threads = 0;
};

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string text;
    for (unsigned i = 0; i < len; ++i) {
        text += hex[digest[i] >> 4];
        text += hex[digest[i] & 15];
    }
    return text;
}

std::vector<std::uint64_t> parse_list(const std::string& text) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(std::stoull(item));
    if (values.empty()) throw ParameterError("expected a comma-separated list, got '" + text + "'");
    return values;
}

std::vector<Real> parse_reals(const std::string& text) {
    std::vector<Real> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(std::stold(item));
    if (values.empty()) throw ParameterError("expected a comma-separated list, got '" + text + "'");
    return values;
}

class Runner {
public:
    Runner(CLI::App* sub, Common& common) : sub_(sub), common_(common) {}

    PlantedGraph instance() const {
        if (common_.graph.empty()) return sample_planted(common_.n, common_.k, common_.seed);
        std::ifstream in(common_.graph);
        if (!in) throw ParameterError("cannot open graph file '" + common_.graph + "'");
        return read_graph(in);
    }

    void emit(const std::string& text, const std::string& path) {
        if (path == "-") {
            std::cout << text;
            std::cout.flush();
        } else {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write '" + path + "'");
            out << text;
        }
        outputs_.push_back({path == "-" ? "<stdout>" : path, sha256_hex(text)});
    }

    void emit(const Json& j, const std::string& path) { emit(j.dump(2) + "\n", path); }

    void finish(double wall_ms) const {
        Json params = Json::object();
        for (const CLI::Option* opt : sub_->get_options()) {
            const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
            if (name == "help" || name.empty()) continue;
            if (opt->count() > 0) {
                const auto& res = opt->results();
                params[name] = res.empty() ? "true" : res.back();
            } else {
                params[name] = opt->get_default_str();
            }
        }
        Json m{{"schema", kSchema},
               {"tool", "plandscape"},
               {"version", kVersion},
               {"subcommand", sub_->get_name()},
               {"params", params},
               {"seed", common_.seed},
               {"threads", resolve_threads(common_.threads)},
               {"wall_ms", wall_ms}};
        Json outs = Json::array();
        for (const auto& [path, digest] : outputs_) outs.push_back({{"path", path}, {"sha256", digest}});
        m["outputs"] = std::move(outs);
        const std::string text = m.dump(2) + "\n";
        if (common_.out == "-") {
            std::cerr << text;
        } else {
            std::ofstream out(common_.out + ".manifest.json", std::ios::binary);
            out << text;
        }
    }

private:
    CLI::App* sub_;
    Common& common_;
    std::vector<std::pair<std::string, std::string>> outputs_;
};

void add_common(CLI::App* sub, Common& c, bool instance) {
    sub->add_option("--seed", c.seed, "RNG seed of record")->capture_default_str();
    sub->add_option("--out", c.out, "output path, '-' for stdout (manifest then goes to stderr)")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads (0: PLANDSCAPE_THREADS or 1)")->capture_default_str();
    if (instance) sub->add_option("--graph", c.graph, "read the instance from a graph file instead of sampling");
}

void add_params(CLI::App* sub, Common& c) {
    sub->add_option("--n", c.n, "vertex count")->capture_default_str();
    sub->add_option("--k", c.k, "planted clique size")->capture_default_str();
    sub->add_option("--kbar", c.kbar, "subgraph size")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planted clique landscape laboratory: first moment curves, exact overlap landscapes, "
                 "flatness checks, Metropolis dynamics and overlap gap certificates."};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Common c;

    // sample
    auto* sample = app.add_subcommand("sample", "sample a planted clique instance in pcg v1 format");
    add_params(sample, c);
    add_common(sample, c, false);

    // curve
    std::string kind = "gamma-tilde";
    std::string tilde_form = "overparametrized";
    std::optional<std::int64_t> z_lo, z_hi;
    bool renormalize = false;
    auto* curve = app.add_subcommand("curve", "evaluate gamma, gamma-tilde or phi on an overlap range (CSV)");
    add_params(curve, c);
    add_common(curve, c, false);
    curve->add_option("--kind", kind, "gamma | gamma-tilde | phi")->capture_default_str();
    curve->add_option("--tilde-form", tilde_form, "overparametrized (C(kbar,2)) | planted (C(k,2))")->capture_default_str();
    curve->add_option("--z-lo", z_lo, "first overlap (default floor(kbar k / n))");
    curve->add_option("--z-hi", z_hi, "last overlap (default k)");
    curve->add_flag("--renormalize", renormalize, "print kbar^{-3/2} (value - C(kbar,2)/2)");

    // classify
    bool empirical = false;
    double margin = 1.0;
    ClassifierConfig ccfg;
    auto* classify = app.add_subcommand("classify", "monotonicity regime of the first moment curve");
    add_params(classify, c);
    add_common(classify, c, false);  // the label goes to stdout; --out receives the JSON detail
    classify->add_flag("--empirical", empirical, "scan the evaluated curve instead of comparing T_n");
    classify->add_option("--kind", kind, "curve for --empirical: gamma | gamma-tilde | phi")->capture_default_str();
    classify->add_option("--margin", margin, "margin factor for the asymptotic comparisons")->capture_default_str();
    classify->add_option("--epsilon", ccfg.epsilon, "window upper end (1 - epsilon) k")->capture_default_str();
    classify->add_option("--c0", ccfg.c0, "window lower end C0 kbar k / n")->capture_default_str();

    // phase
    std::string k_grid = "100,300,1000,3000,10000", kbar_grid = "100,1000,10000,100000,1000000";
    auto* phase = app.add_subcommand("phase", "label a (k, kbar) grid by regime (CSV)");
    std::uint64_t phase_n = 10'000'000;
    phase->add_option("--n", phase_n, "vertex count")->capture_default_str();
    phase->add_option("--k-grid", k_grid, "comma-separated k values")->capture_default_str();
    phase->add_option("--kbar-grid", kbar_grid, "comma-separated kbar values")->capture_default_str();
    phase->add_option("--margin", margin, "margin factor")->capture_default_str();
    add_common(phase, c, false);

    // dense
    std::uint64_t big_k = 0;
    std::string method = "exhaustive";
    std::size_t restarts = 20;
    std::uint64_t budget = kDefaultEnumerationBudget;
    auto* dense = app.add_subcommand("dense", "densest K-subgraph of G(n, 1/2) against the first moment prediction (JSON)");
    dense->add_option("--n", c.n, "vertex count")->capture_default_str();
    dense->add_option("--K", big_k, "subgraph size")->required();
    dense->add_option("--method", method, "exhaustive | local | none")->capture_default_str();
    dense->add_option("--restarts", restarts, "local search restarts")->capture_default_str();
    dense->add_option("--budget", budget, "search node budget for exhaustive mode")->capture_default_str();
    add_common(dense, c, false);

    // d-curve
    auto* dcurve = app.add_subcommand("d-curve", "overlap-restricted densest values d(z) of an instance (CSV)");
    add_params(dcurve, c);
    add_common(dcurve, c, true);
    dcurve->add_option("--method", method, "exhaustive | local")->capture_default_str();
    dcurve->add_option("--restarts", restarts, "local search restarts")->capture_default_str();
    dcurve->add_option("--budget", budget, "enumeration budget per overlap")->capture_default_str();

    // flatness
    std::size_t flat_k = 18;
    double gamma = 0.6, delta = 0.2;
    std::string mode = "exhaustive";
    auto* flat = app.add_subcommand("flatness", "(gamma, delta)-flatness of an edge-conditioned random graph (JSON)");
    flat->add_option("--K", flat_k, "vertex count")->capture_default_str();
    flat->add_option("--gamma", gamma, "edge density")->capture_default_str();
    flat->add_option("--delta", delta, "slack parameter")->capture_default_str();
    flat->add_option("--mode", mode, "exhaustive | sampled:<count>")->capture_default_str();
    add_common(flat, c, false);

    // mcmc
    MCMCConfig mc;
    mc.beta = 1;
    mc.t_max = 10000;
    mc.d2 = 0.4;
    std::string init_mode = "auto";
    std::string summary;
    auto* mcmc = app.add_subcommand("mcmc", "run the Metropolis chain from a uniform subset (trace CSV)");
    add_params(mcmc, c);
    add_common(mcmc, c, true);
    mcmc->add_option("--beta", mc.beta, "inverse temperature")->capture_default_str();
    mcmc->add_option("--t-max", mc.t_max, "step budget")->capture_default_str();
    mcmc->add_option("--stride", mc.stride, "recording stride")->capture_default_str();
    mcmc->add_option("--summary", summary, "also write the run summary as JSON here");

    // hit
    std::size_t replicas = 1;
    auto* hit = app.add_subcommand("hit", "hitting time of overlap above the well from the conditional Gibbs law (JSON)");
    add_params(hit, c);
    add_common(hit, c, true);
    hit->add_option("--beta", mc.beta, "inverse temperature")->capture_default_str();
    hit->add_option("--t-max", mc.t_max, "step budget")->capture_default_str();
    hit->add_option("--d1", mc.d1, "A0/A1 boundary in units of sqrt(kbar / ln(n/kbar))")->capture_default_str();
    hit->add_option("--d2", mc.d2, "A1 upper boundary in the same units")->capture_default_str();
    hit->add_option("--init", init_mode, "auto | exact | burn-in")->capture_default_str();
    hit->add_option("--burn-in", mc.burn_in, "burn-in steps (0: 100 n kbar)")->capture_default_str();
    hit->add_option("--replicas", replicas, "independent runs with derived seeds")->capture_default_str();

    // few
    std::string betas = "0,1,2,4";
    auto* few = app.add_subcommand("few", "free energy well log-ratios over a beta sweep (JSON)");
    add_params(few, c);
    add_common(few, c, true);
    few->add_option("--betas", betas, "comma-separated inverse temperatures")->capture_default_str();
    few->add_option("--d1", mc.d1, "A0/A1 boundary")->capture_default_str();
    few->add_option("--d2", mc.d2, "A1 upper boundary")->capture_default_str();

    // ogp
    std::optional<std::int64_t> zeta1, zeta2;
    std::optional<double> r_n;
    auto* ogp = app.add_subcommand("ogp", "certify or refute the overlap gap property of an instance (JSON); "
                                          "exit 0 certified, 3 refuted, 4 not certifiable");
    add_params(ogp, c);
    add_common(ogp, c, true);
    ogp->add_option("--method", method, "exhaustive | local")->capture_default_str();
    ogp->add_option("--zeta1", zeta1, "lower overlap threshold (with --zeta2 and --rn; otherwise chosen automatically)");
    ogp->add_option("--zeta2", zeta2, "upper overlap threshold");
    ogp->add_option("--rn", r_n, "edge threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    Runner run(sub, c);
    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        const std::string name = sub->get_name();
        const unsigned threads = resolve_threads(c.threads);
        if (name == "sample") {
            run.emit(to_graph_text(sample_planted(c.n, c.k, c.seed)), c.out);
        } else if (name == "curve") {
            CurveRequest req;
            req.kind = parse_curve_kind(kind);
            if (tilde_form == "planted") req.tilde_form = TildeForm::PlantedPairs;
            else if (tilde_form != "overparametrized") throw ParameterError("--tilde-form must be overparametrized or planted");
            req.z_lo = z_lo;
            req.z_hi = z_hi;
            req.threads = threads;
            OverlapCurve cv = evaluate_curve({c.n, c.k, c.kbar}, req);
            if (renormalize) {
                const auto values = renormalized(cv);
                for (std::size_t i = 0; i < values.size(); ++i) cv.points[i].value = values[i];
            }
            std::ostringstream os;
            write_curve_csv(os, cv);
            run.emit(os.str(), c.out);
        } else if (name == "classify") {
            const ModelParams p{c.n, c.k, c.kbar};
            MonotonicityClass m;
            Json detail{{"schema", kSchema}, {"params", to_json(p)}};
            if (empirical) {
                CurveRequest req;
                req.kind = parse_curve_kind(kind);
                req.threads = threads;
                m = classify_empirical(evaluate_curve(p, req), ccfg);
                detail["method"] = "empirical";
                detail["curve"] = to_string(req.kind);
                detail["epsilon"] = ccfg.epsilon;
                detail["c0"] = ccfg.c0;
            } else {
                m = classify_asymptotic(p, margin);
                detail["method"] = "asymptotic";
                detail["margin"] = margin;
                if (p.kbar < p.n) {
                    const auto d = asymptotic_detail(p);
                    detail["t_n"] = static_cast<double>(d.t_n);
                    detail["lower"] = static_cast<double>(d.lower);
                    detail["upper"] = static_cast<double>(d.upper);
                }
            }
            detail["result"] = to_json(m);
            std::cout << to_string(m.label) << '\n';
            if (c.out != "-") run.emit(detail, c.out);
        } else if (name == "phase") {
            std::ostringstream os;
            write_phase_csv(os, phase_diagram(phase_n, parse_list(k_grid), parse_list(kbar_grid), margin));
            run.emit(os.str(), c.out);
        } else if (name == "dense") {
            Json j = to_json(er_prediction(c.n, big_k));
            if (method != "none") {
                const Graph g = sample_gnp_half(c.n, c.seed);
                DensestResult r;
                if (method == "exhaustive") r = exact_densest_er(g, big_k, budget);
                else if (method == "local") r = local_search_densest(g, big_k, restarts, c.seed);
                else throw ParameterError("--method must be exhaustive, local or none");
                j["seed"] = c.seed;
                j["method"] = to_string(r.method);
                j["value"] = r.value;
                j["witness"] = r.witness.members();
            }
            run.emit(j, c.out);
        } else if (name == "d-curve") {
            const PlantedGraph g = run.instance();
            DCurveOptions opts;
            opts.method = parse_curve_method(method);
            opts.restarts = restarts;
            opts.seed = c.seed;
            opts.threads = threads;
            opts.budget = budget;
            std::ostringstream os;
            write_d_curve_csv(os, d_curve(g, c.kbar, opts));
            run.emit(os.str(), c.out);
        } else if (name == "flatness") {
            const Graph g = sample_conditioned(flat_k, gamma, c.seed);
            const FlatnessReport rep = is_flat(g, gamma, delta, FlatnessMode::parse(mode, c.seed));
            run.emit(to_json(rep), c.out);
            if (!rep.is_flat) code = kRefuted;
        } else if (name == "mcmc") {
            const PlantedGraph g = run.instance();
            mc.kbar = c.kbar;
            mc.seed = derive_seed(c.seed, 2);
            Rng rng(derive_seed(c.seed, 1));
            std::vector<Vertex> all(g.n());
            for (std::size_t v = 0; v < g.n(); ++v) all[v] = static_cast<Vertex>(v);
            if (c.kbar > g.n()) throw ParameterError("kbar exceeds n");
            for (std::size_t i = 0; i < c.kbar; ++i) std::swap(all[i], all[i + rng.below(g.n() - i)]);
            const VertexSubset init(std::vector<Vertex>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(c.kbar)));
            const auto t0 = std::chrono::steady_clock::now();
            const ChainTrace trace = run_chain(g, mc, init);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            std::ostringstream os;
            write_trace_csv(os, trace);
            run.emit(os.str(), c.out);
            if (!summary.empty()) run.emit(experiment_json(mc, trace, ms), summary);
        } else if (name == "hit") {
            const PlantedGraph g = run.instance();
            mc.kbar = c.kbar;
            mc.stride = std::max<std::uint64_t>(mc.t_max, 1);
            if (init_mode == "auto") mc.init = InitMode::Auto;
            else if (init_mode == "exact") mc.init = InitMode::Exact;
            else if (init_mode == "burn-in") mc.init = InitMode::BurnIn;
            else throw ParameterError("--init must be auto, exact or burn-in");
            if (replicas == 0) throw ParameterError("--replicas must be positive");
            std::vector<Json> runs(replicas);
            parallel_for(replicas, threads, [&](std::size_t r) {
                MCMCConfig cfg = mc;
                cfg.seed = replicas == 1 ? c.seed : derive_seed(c.seed, 1000 + r);
                const auto t0 = std::chrono::steady_clock::now();
                const ChainTrace trace = hitting_time(g, cfg);
                const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                runs[r] = experiment_json(cfg, trace, ms);
            });
            if (replicas == 1) {
                run.emit(runs.front(), c.out);
            } else {
                std::vector<std::uint64_t> times;
                for (const auto& r : runs) times.push_back(r["hit_time"].is_null() ? mc.t_max + 1 : r["hit_time"].get<std::uint64_t>());
                std::sort(times.begin(), times.end());
                const std::size_t censored = static_cast<std::size_t>(
                    std::count_if(runs.begin(), runs.end(), [](const Json& r) { return r["censored"].get<bool>(); }));
                Json j{{"schema", kSchema}, {"replicas", replicas}, {"censored", censored}};
                // Censored runs sort above every observed time, so the median is exact unless half are censored.
                const std::uint64_t med = times[(times.size() - 1) / 2];
                j["median_hit_time"] = med > mc.t_max ? Json(nullptr) : Json(med);
                j["runs"] = runs;
                run.emit(j, c.out);
            }
        } else if (name == "few") {
            const PlantedGraph g = run.instance();
            const ModelParams p{g.n(), g.k(), c.kbar};
            const WellPartition part = WellPartition::from(p, mc.d1, mc.d2);
            Json j{{"schema", kSchema}, {"params", to_json(p)}};
            j["partition"] = {{"a0_max", part.a0_max}, {"a1_min", part.a1_min}, {"a1_max", part.a1_max}, {"a2_min", part.a2_min},
                              {"valid", part.valid()}};
            std::optional<DCurve> dc;
            try {
                dc = d_curve(g, c.kbar);
            } catch (const BudgetExceeded&) {
            }
            Json rows = Json::array();
            for (Real beta : parse_reals(betas)) {
                Json row{{"beta", static_cast<double>(beta)}};
                const Real ratio = few_ratio(g, c.kbar, beta, part);
                row["ln_ratio"] = std::isfinite(ratio) ? Json(static_cast<double>(ratio)) : Json("inf");
                if (dc) row["lower_bound"] = static_cast<double>(few_ratio_lower_bound(dc->curve, part, beta));
                rows.push_back(row);
            }
            j["sweep"] = rows;
            run.emit(j, c.out);
        } else if (name == "ogp") {
            const PlantedGraph g = run.instance();
            DCurveOptions opts;
            opts.method = parse_curve_method(method);
            opts.seed = c.seed;
            opts.threads = threads;
            const DCurve dc = d_curve(g, c.kbar, opts);
            if (!dc.exact()) {
                Json j{{"schema", kSchema}, {"certifiable", false},
                       {"explanation", "local-search curves are lower bounds; they give evidence, not certificates"}};
                const auto dip = type_m_witness(dc.curve);
                j["dip_overlap"] = dip ? Json(dip->z_star) : Json(nullptr);
                run.emit(j, c.out);
                code = kNotCertifiable;
            } else {
                OGPCertificate cert;
                if (zeta1 || zeta2 || r_n) {
                    if (!(zeta1 && zeta2 && r_n)) throw ParameterError("--zeta1, --zeta2 and --rn go together");
                    cert = certify_ogp(g, c.kbar, dc, *zeta1, *zeta2, *r_n);
                } else {
                    cert = auto_certify(g, c.kbar, dc);
                }
                run.emit(to_json(cert), c.out);
                code = cert.holds ? kOk : kRefuted;
            }
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBudget;
    } catch (const NotCertifiable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNotCertifiable;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    run.finish(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    return code;
}
