#pragma once

/**
 * Command-line front end. run_command() takes the arguments after the program
 * name and returns the process exit code:
 *
 *   0  success, every checked property holds
 *   1  usage, input or I/O error
 *   2  a checked mathematical property failed
 */

#include "adversarial.hpp"
#include "bounds.hpp"
#include "counterexamples.hpp"
#include "datagen.hpp"
#include "fuzz.hpp"
#include "io.hpp"
#include "lemmas.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace regbound {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_violation = 2;

namespace cli_detail {

struct Globals
{
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
};

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            parts.push_back(item);
    return parts;
}

inline HypothesisClass parse_class(const std::string& s, double bound)
{
    if (s == "allbounded")
        return HypothesisClass::all_bounded(bound);
    if (s == "constant")
        return HypothesisClass::constant_bounded(bound);
    throw parse_error("unknown class '" + s + "' (expected allbounded|constant)");
}

// Either a JSON file or "fuzz:seed,count".
struct DistributionSource
{
    std::vector<std::pair<std::string, FiniteDistribution>> dists;
    json digest_input;
};

inline DistributionSource load_distributions(const std::string& config)
{
    DistributionSource src;
    if (config.rfind("fuzz:", 0) == 0) {
        const auto parts = split_list(config.substr(5));
        if (parts.size() != 2)
            throw parse_error("fuzz config needs the form fuzz:seed,count");
        const auto seed = static_cast<std::uint64_t>(detail::parse_double(parts[0], "fuzz seed"));
        const auto count = static_cast<int>(detail::parse_double(parts[1], "fuzz count"));
        if (count < 1)
            throw parse_error("fuzz count must be >= 1");
        for (int k = 0; k < count; ++k)
            src.dists.emplace_back("fuzz:" + std::to_string(seed + k), fuzz_distribution(seed + k));
        src.digest_input = config;
        return src;
    }
    json j = read_json_file(config);
    src.dists.emplace_back(config, distribution_from_json(j));
    src.digest_input = std::move(j);
    return src;
}

inline json components_to_json(const BoundComponents& c)
{
    return {{"target_estimation_error", c.target_estimation_error},
            {"target_gap", c.target_gap},
            {"surrogate_estimation_error", c.surrogate_estimation_error},
            {"surrogate_gap", c.surrogate_gap}};
}

class Runner
{
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    void write_output(const std::string& path, const std::string& text, const std::string& command, const json& config,
                      std::uint64_t seed, std::vector<std::string> extra = {})
    {
        write_text_file(path, text);
        RunManifest m;
        m.command = command;
        m.config_digest = config_digest(config);
        m.seed = seed;
        m.outputs.push_back(path);
        for (auto& e : extra)
            m.outputs.push_back(std::move(e));
        write_json_file(manifest_path_for(path), manifest_to_json(m));
    }

    std::ostream& out_;
    std::ostream& err_;
};

inline std::string fmt(double v, int precision = 6)
{
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

} // namespace cli_detail

/// Aggregates eval.json files into rows (method, gamma) with mean and sample
/// standard deviation of the clean and robust errors. CSV when the output
/// path ends in ".csv", Markdown otherwise.
inline std::string render_report(const std::vector<json>& evals, bool csv)
{
    struct Acc
    {
        std::vector<double> clean, robust;
    };
    std::map<std::pair<std::string, double>, Acc> groups;
    for (const json& e : evals) {
        const std::string method = e.value("method", std::string("unknown"));
        const double gamma = e.value("gamma", 0.0);
        auto& acc = groups[{method, gamma}];
        acc.clean.push_back(e.at("clean_mse").get<double>());
        acc.robust.push_back(e.at("robust_mse").get<double>());
    }
    auto mean_sd = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v)
            mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    std::ostringstream os;
    if (csv)
        os << "method,gamma,runs,clean_mean,clean_sd,robust_mean,robust_sd\n";
    else
        os << "| Method | gamma | Runs | Clean | Robust |\n|---|---|---|---|---|\n";
    for (const auto& [key, acc] : groups) {
        const auto [cm, cs] = mean_sd(acc.clean);
        const auto [rm, rs] = mean_sd(acc.robust);
        if (csv)
            os << key.first << ',' << cli_detail::fmt(key.second) << ',' << acc.clean.size() << ','
               << cli_detail::fmt(cm) << ',' << cli_detail::fmt(cs) << ',' << cli_detail::fmt(rm) << ','
               << cli_detail::fmt(rs) << '\n';
        else
            os << "| " << key.first << " | " << cli_detail::fmt(key.second) << " | " << acc.clean.size() << " | "
               << cli_detail::fmt(cm, 4) << " ± " << cli_detail::fmt(cs, 2) << " | " << cli_detail::fmt(rm, 4)
               << " ± " << cli_detail::fmt(rs, 2) << " |\n";
    }
    return os.str();
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr)
{
    using namespace cli_detail;
    CLI::App app{"Consistency bounds for regression surrogates and adversarial linear regression", "regbound"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--out", g.out, "Output path");
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    Runner run(out, err);
    int code = exit_ok;

    // verify-bounds
    auto* vb = app.add_subcommand("verify-bounds", "Check the consistency bounds on distributions");
    std::string vb_config, vb_class, vb_surrogates;
    int vb_hyp = 50;
    vb->add_option("--config", vb_config, "dist.json or fuzz:seed,count")->required();
    vb->add_option("--class", vb_class, "allbounded|constant")->required();
    vb->add_option("--surrogates", vb_surrogates, "Comma-separated loss tags")->required();
    vb->add_option("--hypotheses", vb_hyp, "Random hypotheses per distribution")->check(CLI::PositiveNumber);
    vb->callback([&] {
        const DistributionSource src = load_distributions(vb_config);
        std::vector<LossKind> surrogates;
        for (const auto& tag : split_list(vb_surrogates))
            surrogates.push_back(parse_loss_kind(tag));
        if (surrogates.empty())
            throw parse_error("no surrogates given");

        struct Slot
        {
            json records = json::array();
            long long checked = 0, held = 0, skipped = 0;
            double min_slack = std::numeric_limits<double>::infinity();
        };
        std::vector<Slot> slots(src.dists.size());
        parallel_for(src.dists.size(), g.threads, [&](std::size_t di) {
            const auto& [label, dist] = src.dists[di];
            const HypothesisClass cls = parse_class(vb_class, dist.bound());
            std::mt19937_64 rng(g.seed * 1000003ULL + di);
            std::vector<Hypothesis> hyps;
            for (int k = 0; k < vb_hyp; ++k)
                hyps.push_back(random_hypothesis(dist, cls, rng));
            Slot& slot = slots[di];
            for (const LossKind& s : surrogates) {
                std::optional<BoundContext> ctx;
                try {
                    ctx.emplace(dist, cls, s);
                } catch (const bound_inapplicable& e) {
                    ++slot.skipped;
                    slot.records.push_back({{"distribution", label}, {"surrogate", to_string(s)}, {"skipped", e.what()}});
                    continue;
                }
                for (std::size_t k = 0; k < hyps.size(); ++k) {
                    const BoundReport r = verify_bound_instance(*ctx, hyps[k]);
                    ++slot.checked;
                    slot.held += r.holds ? 1 : 0;
                    slot.min_slack = std::min(slot.min_slack, r.slack);
                    slot.records.push_back({{"distribution", label},
                                            {"surrogate", to_string(s)},
                                            {"hypothesis", k},
                                            {"lhs", r.lhs},
                                            {"rhs", r.rhs},
                                            {"slack", r.slack},
                                            {"holds", r.holds},
                                            {"gamma", r.gamma},
                                            {"components", components_to_json(r.components)}});
                }
            }
        });
        Slot total;
        for (auto& s : slots) {
            for (auto& r : s.records)
                total.records.push_back(std::move(r));
            total.checked += s.checked;
            total.held += s.held;
            total.skipped += s.skipped;
            total.min_slack = std::min(total.min_slack, s.min_slack);
        }
        json summary = {{"checked", total.checked}, {"held", total.held}, {"skipped", total.skipped}};
        summary["min_slack"] = total.checked > 0 ? json(total.min_slack) : json(nullptr);
        out << "verify-bounds: checked " << total.checked << ", held " << total.held << ", skipped " << total.skipped
            << ", min slack " << (total.checked > 0 ? fmt(total.min_slack) : std::string("n/a")) << "\n";
        if (!g.out.empty()) {
            const json config = {{"config", src.digest_input},
                                 {"class", vb_class},
                                 {"surrogates", vb_surrogates},
                                 {"hypotheses", vb_hyp}};
            run.write_output(g.out, json{{"reports", total.records}, {"summary", summary}}.dump(2) + "\n",
                             "verify-bounds", config, g.seed);
        }
        if (total.held != total.checked)
            code = exit_violation;
    });

    // counterexample
    auto* ce = app.add_subcommand("counterexample", "Build and check a negative-result instance");
    std::string ce_theorem;
    CounterexampleParams ce_params{};
    ce->add_option("--theorem", ce_theorem, "huber|sqeps|eps-far|eps-near")->required();
    ce->add_option("--B", ce_params.bound, "Label bound")->required();
    ce->add_option("--y", ce_params.y, "Lower atom")->required();
    ce->add_option("--mu", ce_params.mu, "Conditional mean")->required();
    ce->add_option("--param", ce_params.width, "delta (huber) or eps")->required();
    ce->callback([&] {
        const CounterexampleCase c = build_counterexample(parse_negative_theorem(ce_theorem), ce_params);
        const CounterexampleOutcome o = assert_counterexample(c);
        const json config = {{"theorem", ce_theorem},
                             {"B", ce_params.bound},
                             {"y", ce_params.y},
                             {"mu", ce_params.mu},
                             {"param", ce_params.width}};
        json result = config;
        result["h_bar"] = c.h_bar.at("x0");
        result["h_star"] = c.h_star.at("x0");
        result["surrogate"] = to_string(c.surrogate());
        result["surrogate_err_hbar"] = o.surrogate_err_hbar;
        result["surrogate_err_hstar"] = o.surrogate_err_hstar;
        result["best_surrogate_err"] = o.best_surrogate_err;
        result["sq_regret_hbar"] = o.sq_regret_hbar;
        result["confirmed"] = o.confirmed;
        out << "counterexample " << ce_theorem << ": surrogate errors " << fmt(o.surrogate_err_hbar, 12) << " / "
            << fmt(o.surrogate_err_hstar, 12) << ", squared regret of h_bar " << fmt(o.sq_regret_hbar, 12)
            << (o.confirmed ? ", confirmed\n" : ", NOT confirmed\n");
        if (!o.confirmed)
            err << o.diagnostics << "\n";
        if (!g.out.empty())
            run.write_output(g.out, result.dump(2) + "\n", "counterexample", config, g.seed);
        if (!o.confirmed)
            code = exit_violation;
    });

    // lemma-check
    auto* lc = app.add_subcommand("lemma-check", "Sweep a pointwise lemma on a grid");
    std::string lc_lemma;
    std::optional<double> lc_delta, lc_B, lc_p, lc_eps, lc_R;
    int lc_grid = 2001;
    lc->add_option("--lemma", lc_lemma, "huberF|clarkson|lpLowF|sqepsF")->required();
    lc->add_option("--delta", lc_delta, "Huber delta");
    lc->add_option("--B", lc_B, "Domain bound");
    lc->add_option("--p", lc_p, "Exponent");
    lc->add_option("--eps", lc_eps, "Tube width");
    lc->add_option("--R", lc_R, "Sweep radius for sqepsF");
    lc->add_option("--grid", lc_grid, "Points per axis")->check(CLI::Range(3, 100001));
    lc->callback([&] {
        auto need = [&](const std::optional<double>& v, const char* flag) {
            if (!v)
                throw parse_error(std::string("--lemma ") + lc_lemma + " requires " + flag);
            return *v;
        };
        LemmaId lemma = [&] {
            if (lc_lemma == "huberF")
                return LemmaId::huber_f(need(lc_delta, "--delta"), need(lc_B, "--B"));
            if (lc_lemma == "clarkson")
                return LemmaId::lp_clarkson(need(lc_p, "--p"), need(lc_B, "--B"));
            if (lc_lemma == "lpLowF")
                return LemmaId::lp_low_f(need(lc_p, "--p"), need(lc_B, "--B"));
            if (lc_lemma == "sqepsF") {
                const double eps = need(lc_eps, "--eps");
                return LemmaId::sq_eps_f(eps, lc_R.value_or(LemmaId::default_sq_eps_radius(eps)));
            }
            throw parse_error("unknown lemma '" + lc_lemma + "' (expected huberF|clarkson|lpLowF|sqepsF)");
        }();
        const LemmaGridResult r = check_lemma_grid(lemma, lc_grid, g.threads);
        out << "lemma-check " << to_string(lemma) << ": " << r.evaluated << " points, " << r.violations
            << " violations, min deviation " << fmt(r.min_deviation, 10) << " at (" << fmt(r.argmin_x) << ", "
            << fmt(r.argmin_y) << ")\n";
        if (!g.out.empty()) {
            const json config = {{"lemma", to_string(lemma)}, {"grid", lc_grid}};
            const json result = {{"lemma", to_string(lemma)},
                                 {"grid", lc_grid},
                                 {"evaluated", r.evaluated},
                                 {"violations", r.violations},
                                 {"min_deviation", r.min_deviation},
                                 {"argmin", {r.argmin_x, r.argmin_y}},
                                 {"threshold", lemma_violation_threshold}};
            run.write_output(g.out, result.dump(2) + "\n", "lemma-check", config, g.seed);
        }
        if (r.violations > 0)
            code = exit_violation;
    });

    // learning-bound
    auto* lb = app.add_subcommand("learning-bound", "Evaluate the finite-sample estimation bound");
    std::string lb_config, lb_class, lb_loss, lb_ms;
    double lb_conf = 0.0;
    int lb_trials = 20;
    lb->add_option("--config", lb_config, "dist.json or fuzz:seed,1")->required();
    lb->add_option("--class", lb_class, "allbounded|constant")->required();
    lb->add_option("--loss", lb_loss, "Surrogate loss tag")->required();
    lb->add_option("--m", lb_ms, "Comma-separated sample sizes")->required();
    lb->add_option("--confidence", lb_conf, "Failure probability in (0, 1)")->required();
    lb->add_option("--trials", lb_trials, "Monte-Carlo samples for the Rademacher estimate")->check(CLI::PositiveNumber);
    lb->callback([&] {
        const DistributionSource src = load_distributions(lb_config);
        if (src.dists.size() != 1)
            throw parse_error("learning-bound takes exactly one distribution");
        const FiniteDistribution& dist = src.dists.front().second;
        const HypothesisClass cls = parse_class(lb_class, dist.bound());
        const LossKind loss = parse_loss_kind(lb_loss);
        json rows = json::array();
        bool ok = true;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& tag : split_list(lb_ms)) {
            const int m = static_cast<int>(detail::parse_double(tag, "sample size"));
            const LearningBoundResult r = evaluate_learning_bound(loss, dist, cls, m, lb_conf, g.seed, lb_trials);
            ok = ok && r.rademacher_estimate >= 0.0 && r.rhs_value < prev;
            prev = r.rhs_value;
            out << "learning-bound m=" << m << ": rhs " << fmt(r.rhs_value, 8) << ", rademacher "
                << fmt(r.rademacher_estimate, 8) << "\n";
            rows.push_back({{"m", m},
                            {"rhs", r.rhs_value},
                            {"rademacher_estimate", r.rademacher_estimate},
                            {"surrogate_gap", r.surrogate_gap},
                            {"target_gap", r.target_gap},
                            {"loss_bound", r.loss_bound},
                            {"deviation_term", r.deviation_term}});
        }
        if (!g.out.empty()) {
            const json config = {{"config", src.digest_input}, {"class", lb_class}, {"loss", lb_loss},
                                 {"m", lb_ms},                {"confidence", lb_conf}, {"trials", lb_trials}};
            run.write_output(g.out, json{{"rows", rows}, {"decreasing", ok}}.dump(2) + "\n", "learning-bound", config,
                             g.seed);
        }
        if (!ok)
            code = exit_violation;
    });

    // synth
    auto* sy = app.add_subcommand("synth", "Generate a synthetic linear dataset");
    int sy_d = 0, sy_m = 0;
    double sy_B = 0.0;
    std::string sy_noise;
    sy->add_option("--d", sy_d, "Feature dimension")->required();
    sy->add_option("--m", sy_m, "Rows")->required();
    sy->add_option("--B", sy_B, "Label bound")->required();
    sy->add_option("--noise", sy_noise, "twopoint:A | uniform:A | outliers:A,FRAC,SCALE")->required();
    sy->callback([&] {
        if (g.out.empty())
            throw parse_error("synth requires --out");
        SynthConfig cfg{g.seed, sy_d, sy_m, sy_B, parse_noise_spec(sy_noise)};
        const SynthResult r = synth_linear_dataset(cfg);
        std::ostringstream csv;
        write_csv_dataset(r.data, csv);
        const std::string truth_path = g.out + ".truth.json";
        write_json_file(truth_path, json{{"w", r.truth.weights}, {"b", r.truth.bias}});
        const json config = {{"d", sy_d}, {"m", sy_m}, {"B", sy_B}, {"noise", to_string(cfg.noise)}};
        run.write_output(g.out, csv.str(), "synth", config, g.seed, {truth_path});
        out << "synth: wrote " << r.data.size() << " rows to " << g.out << "\n";
    });

    // adv-train
    auto* at = app.add_subcommand("adv-train", "Train a linear model on an adversarial objective");
    std::string at_data, at_loss, at_norm, at_objective = "smooth-adv";
    std::optional<double> at_tau;
    double at_gamma = 0.0;
    SolverConfig solver;
    at->add_option("--data", at_data, "Training CSV")->required();
    at->add_option("--objective", at_objective, "smooth-adv|adv-sq");
    at->add_option("--loss", at_loss, "Surrogate loss tag (smooth-adv)");
    at->add_option("--tau", at_tau, "Smoothness weight (smooth-adv)");
    at->add_option("--gamma", at_gamma, "Perturbation radius")->required();
    at->add_option("--norm", at_norm, "linf|l2|l1")->required();
    at->add_option("--max-iters", solver.max_iters, "Iteration cap");
    at->add_option("--tol", solver.tol, "Stopping tolerance");
    at->add_option("--step0", solver.step0, "Initial step size");
    at->callback([&] {
        if (g.out.empty())
            throw parse_error("adv-train requires --out");
        solver.seed = g.seed;
        const Dataset data = load_csv_dataset(at_data);
        const PerturbationNorm norm = parse_perturbation_norm(at_norm);
        TrainObjective obj = [&] {
            if (at_objective == "adv-sq")
                return TrainObjective::adv_sq(at_gamma, norm);
            if (at_objective != "smooth-adv")
                throw parse_error("unknown objective '" + at_objective + "' (expected smooth-adv|adv-sq)");
            if (at_loss.empty() || !at_tau)
                throw parse_error("smooth-adv requires --loss and --tau");
            AdvConfig cfg;
            cfg.gamma = at_gamma;
            cfg.norm = norm;
            cfg.tau = *at_tau;
            cfg.surrogate = parse_loss_kind(at_loss);
            return TrainObjective::smooth_adv(cfg);
        }();
        if (obj.kind == TrainObjective::Kind::smooth_adv &&
            obj.cfg.surrogate.family() == LossFamily::eps_insensitive)
            err << "warning: the epsilon-insensitive loss carries no consistency guarantee for the squared loss\n";
        const TrainResult r = train(obj, data, solver);
        // Empirical 3B' with B' bounding |h(x)| and |y| on the training rows.
        double b_prime = 0.0;
        for (const Sample& row : data.rows)
            b_prime = std::max({b_prime, std::abs(r.model.predict(row.features)), std::abs(row.label)});
        const std::string method = obj.kind == TrainObjective::Kind::adv_sq
                                       ? std::string("adv-sq")
                                       : "smooth-adv[" + to_string(obj.cfg.surrogate) + ",tau=" +
                                             detail::format_double(obj.cfg.tau) + "]";
        json model = model_to_json(r);
        model["method"] = method;
        model["solver"] = r.method;
        model["gamma"] = at_gamma;
        model["norm"] = at_norm;
        model["nu_empirical"] = 3.0 * b_prime;
        if (r.certified_gap)
            model["certified_gap"] = *r.certified_gap;
        json config = {{"data", at_data},         {"objective", at_objective}, {"gamma", at_gamma},
                       {"norm", at_norm},         {"max_iters", solver.max_iters}, {"tol", solver.tol},
                       {"step0", solver.step0}};
        if (at_tau)
            config["tau"] = *at_tau;
        if (!at_loss.empty())
            config["loss"] = at_loss;
        run.write_output(g.out, model.dump(2) + "\n", "adv-train", config, g.seed);
        out << "adv-train " << method << ": objective " << fmt(r.objective, 10) << " after " << r.iters
            << " iterations (" << r.method << ")\n";
    });

    // adv-eval
    auto* ae = app.add_subcommand("adv-eval", "Clean and robust squared error of a trained model");
    std::string ae_model, ae_data, ae_norm;
    double ae_gamma = 0.0;
    ae->add_option("--model", ae_model, "model.json")->required();
    ae->add_option("--data", ae_data, "Test CSV")->required();
    ae->add_option("--gamma", ae_gamma, "Perturbation radius")->required();
    ae->add_option("--norm", ae_norm, "linf|l2|l1")->required();
    ae->callback([&] {
        if (g.out.empty())
            throw parse_error("adv-eval requires --out");
        const json mj = read_json_file(ae_model);
        const LinearModel model = model_from_json(mj);
        const Dataset data = load_csv_dataset(ae_data);
        const EvalResult r = evaluate(model, data, ae_gamma, parse_perturbation_norm(ae_norm));
        const json result = {{"clean_mse", r.clean_mse},
                             {"robust_mse", r.robust_mse},
                             {"method", mj.value("method", std::string("unknown"))},
                             {"gamma", ae_gamma},
                             {"norm", ae_norm}};
        const json config = {{"model", mj}, {"data", ae_data}, {"gamma", ae_gamma}, {"norm", ae_norm}};
        run.write_output(g.out, result.dump(2) + "\n", "adv-eval", config, g.seed);
        out << "adv-eval: clean " << fmt(r.clean_mse, 8) << ", robust " << fmt(r.robust_mse, 8) << "\n";
        if (!(r.robust_mse >= r.clean_mse))
            code = exit_violation;
    });

    // report
    auto* rp = app.add_subcommand("report", "Aggregate eval.json files into a table");
    std::vector<std::string> rp_inputs;
    rp->add_option("inputs", rp_inputs, "eval.json files");
    rp->callback([&] {
        if (rp_inputs.empty())
            throw parse_error("report needs at least one eval.json input");
        std::vector<json> evals;
        json digest = json::array();
        for (const auto& path : rp_inputs) {
            json e = read_json_file(path);
            if (!e.is_object() || !e.contains("clean_mse") || !e.contains("robust_mse") ||
                !e.at("clean_mse").is_number() || !e.at("robust_mse").is_number())
                throw parse_error(path + ": expected clean_mse and robust_mse numbers");
            digest.push_back(e);
            evals.push_back(std::move(e));
        }
        const bool csv = g.out.size() >= 4 && g.out.compare(g.out.size() - 4, 4, ".csv") == 0;
        const std::string table = render_report(evals, csv);
        if (g.out.empty())
            out << table;
        else
            run.write_output(g.out, table, "report", json{{"inputs", digest}}, g.seed);
    });

    std::vector<std::string> argv_store{"regbound"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return exit_usage;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return code;
}

} // namespace regbound
