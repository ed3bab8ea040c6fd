#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

#include "wwp/experiment.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string eps_list;
    std::optional<int> n_points;
    std::optional<double> horizon;
    std::optional<long> seed;
    std::optional<int> threads;
    std::vector<std::string> sets;
};

void add_flags(CLI::App *app, Flags &f)
{
    app->add_option("--config", f.config, "key = value config file");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--eps-list", f.eps_list, "comma separated eps values");
    app->add_option("--n-points", f.n_points, "fast grid size for every eps");
    app->add_option("--t-horizon", f.horizon, "slow horizon; runs reach t = horizon / eps^2");
    app->add_option("--seed", f.seed, "seed recorded in the manifest");
    app->add_option("--threads", f.threads, "worker threads across the eps sweep");
    app->add_option("--set", f.sets, "extra key=value override (repeatable)");
}

wwp::ExperimentConfig resolve(const std::string &sub, const Flags &f)
{
    wwp::ExperimentConfig c = wwp::default_config(sub);
    if (!f.config.empty()) wwp::apply_config_file(c, f.config);
    for (const auto &s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw wwp::ConfigError("--set expects key=value, got '" + s + "'");
        wwp::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.out.empty()) c.out_dir = f.out;
    if (!f.eps_list.empty()) wwp::apply_setting(c, "eps_list", f.eps_list);
    if (f.n_points) c.n_points = *f.n_points;
    if (f.horizon) c.horizon = *f.horizon;
    if (f.seed) wwp::apply_setting(c, "seed", std::to_string(*f.seed));
    if (f.threads) c.threads = *f.threads;
    return c;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"weakly nonlinear water wave packet experiments"};
    app.require_subcommand(1);

    std::map<std::string, Flags> flags;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"nls-check", "soliton, conservation and splitting order checks"},
        {"residuals", "eps sweep of the packet residuals with slope fits"},
        {"evolve", "admissible data and a full evolution for the first eps"},
        {"error-scaling", "evolutions over the eps list and the error slope fit"},
    };
    for (const auto &[name, help] : subs) add_flags(app.add_subcommand(name, help), flags[name]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(wwp::ExitCode::regime);
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        const wwp::ExperimentConfig c = resolve(sub, flags[sub]);
        int rc = 0;
        if (sub == "nls-check") rc = wwp::run_nls_check(c);
        else if (sub == "residuals") rc = wwp::run_residuals(c);
        else if (sub == "evolve") rc = wwp::run_evolve(c);
        else rc = wwp::run_error_scaling(c);
        std::cout << sub << ": " << (rc == 0 ? "pass" : rc == 1 ? "band failure" : "regime failure") << " (outputs in "
                  << c.out_dir << ")\n";
        return rc;
    } catch (const wwp::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
    } catch (const wwp::RegimeError &e) {
        std::cerr << "regime error: " << e.what() << '\n';
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return static_cast<int>(wwp::ExitCode::regime);
}
