// Command-line driver for the S-adic rigidity engine.

#include "sadic/cli.hpp"

#include "CLI11.hpp"

using namespace sadic;

namespace {

struct SystemFlags {
    std::string config_path;
    int zeta_L = 0;
    bool desk_variant = false;
    bool paper_final = false;
    int L = 6;
    int d = 2;
    bool example3 = false;
    bool zeta_plus_one = false;
};

void add_system_flags(CLI::App* app, SystemFlags& f) {
    app->add_option("--config", f.config_path, "JSON run configuration file");
    app->add_option("--zeta", f.zeta_L, "constant sequence of zeta_L");
    app->add_flag("--desk-variant", f.desk_variant, "glued zeta_L / zeta_{L^2} desk system");
    app->add_flag("--paper-final", f.paper_final, "glued zeta_{L^{2^{i+1}}} system");
    app->add_flag("--example3", f.example3, "built-in d=2 length-4 glued example");
    app->add_option("--L", f.L, "zeta parameter for --desk-variant/--paper-final");
    app->add_option("--d", f.d, "number of components for --paper-final");
    app->add_flag("--zeta-plus-one", f.zeta_plus_one, "use the a -> a^L b convention (length L+1)");
}

struct CommonFlags {
    int k = 6;
    long depth = 24;
    std::string tolerance = "1e-6";
    std::vector<long> levels;
    std::string format = "table";
    std::string out;
};

void add_common_flags(CLI::App* app, CommonFlags& f) {
    app->add_option("--k", f.k, "word order (max cylinder length)");
    app->add_option("--depth", f.depth, "depth cap for the transfer ansatz");
    app->add_option("--tolerance", f.tolerance, "convergence tolerance (rational or decimal)");
    app->add_option("--levels", f.levels, "levels n to evaluate")->delimiter(',');
    app->add_option("--format", f.format, "table | json | csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    app->add_option("--out", f.out, "output path (default stdout)");
}

RunConfig make_config(const SystemFlags& sf, const CommonFlags& cf) {
    RunConfig cfg;
    if (!sf.config_path.empty()) {
        cfg = load_config(sf.config_path);
    } else {
        nlohmann::json sys;
        if (sf.zeta_L > 0) {
            sys["kind"] = "constant";
            std::string a(sf.zeta_L - (sf.zeta_plus_one ? 0 : 1), 'a');
            std::string b(sf.zeta_L - (sf.zeta_plus_one ? 0 : 1), 'b');
            sys["substitutions"] = {"a -> " + a + "b\nb -> " + b + "a"};
        } else if (sf.desk_variant) {
            sys["kind"] = "desk-variant";
            sys["L"] = sf.L;
            sys["zeta_length_plus_one"] = sf.zeta_plus_one;
        } else if (sf.paper_final) {
            sys["kind"] = "paper-final";
            sys["L"] = sf.L;
            sys["d"] = sf.d;
            sys["zeta_length_plus_one"] = sf.zeta_plus_one;
        } else if (sf.example3) {
            sys["kind"] = "glued";
            sys["substitutions"] = {"a -> abba\nb -> baab", "a -> abbb\nb -> baaa"};
            sys["exponent_coefficients"] = {1, 1};
        } else {
            throw ConfigError("no system selected (use --config/--zeta/--desk-variant/"
                              "--paper-final/--example3)");
        }
        nlohmann::json root = {{"version", 1}, {"system", sys}};
        cfg = parse_config(root);
    }
    cfg.k = cf.k;
    cfg.depth_cap = cf.depth;
    cfg.tolerance = detail::parse_rational(nlohmann::json(cf.tolerance), "tolerance");
    if (!cf.levels.empty()) cfg.levels = cf.levels;
    cfg.format = cf.format;
    cfg.out_path = cf.out;
    if (cfg.k < 2 || cfg.depth_cap < 1 || cfg.tolerance <= 0)
        throw ConfigError("invalid parameters: need k >= 2, depth >= 1, tolerance > 0");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sadic: constant-length S-adic subshifts, invariant measures, "
                 "partial rigidity rates"};
    app.require_subcommand(1);

    SystemFlags rate_sys, meas_sys, lang_sys, comp_sys, emp_sys, ver_sys;
    CommonFlags rate_cf, meas_cf, lang_cf, comp_cf, emp_cf;

    auto* rate = app.add_subcommand("rate", "partial rigidity rate estimates per ergodic component");
    add_system_flags(rate, rate_sys);
    add_common_flags(rate, rate_cf);
    int rate_component = -1;
    rate->add_option("--component", rate_component, "restrict to one ergodic component");

    auto* measure = app.add_subcommand("measure", "invariant/ergodic measure tables");
    add_system_flags(measure, meas_sys);
    add_common_flags(measure, meas_cf);
    int meas_component = 0;
    long meas_level = 1;
    measure->add_option("--component", meas_component, "ergodic component index");
    measure->add_option("--level", meas_level, "level n");

    auto* lang = app.add_subcommand("language", "level language up to a word length");
    add_system_flags(lang, lang_sys);
    add_common_flags(lang, lang_cf);
    long lang_level = 0;
    int lang_m = 4;
    long lang_depth = 0;
    lang->add_option("--level", lang_level, "level n");
    lang->add_option("--m", lang_m, "max word length");
    lang->add_option("--lang-depth", lang_depth, "explicit depth N - n (0 = automatic)");

    auto* comp = app.add_subcommand("complexity", "word complexity profile p(j)");
    add_system_flags(comp, comp_sys);
    add_common_flags(comp, comp_cf);
    long comp_level = 0;
    int comp_m = 10;
    comp->add_option("--level", comp_level, "level n");
    comp->add_option("--m", comp_m, "max word length");

    auto* emp = app.add_subcommand("empirical", "empirical measure / return mass of a prefix");
    add_system_flags(emp, emp_sys);
    add_common_flags(emp, emp_cf);
    long emp_power = 4;
    long emp_h = 0;
    emp->add_option("--power", emp_power, "materialize sigma_[0,power)(a)");
    emp->add_option("--shift", emp_h, "return-mass shift h (0 = skip)");

    auto* ver = app.add_subcommand("verify", "named reproduction checks");
    std::vector<std::string> ver_names;
    std::string ver_L;
    ver->add_option("checks", ver_names, "check names (default: all)");
    ver->add_option("--config", ver_sys.config_path, "JSON run configuration file");
    ver->add_option("--L", ver_L, "zeta range like 6..12 for zeta-closed-form");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) {
            auto cfg = make_config(rate_sys, rate_cf);
            cli::OutputSink sink(cfg.out_path);
            std::optional<int> comp_opt;
            if (rate_component >= 0) comp_opt = rate_component;
            return cli::cmd_rate(cfg, comp_opt, sink.stream());
        }
        if (measure->parsed()) {
            auto cfg = make_config(meas_sys, meas_cf);
            cli::OutputSink sink(cfg.out_path);
            return cli::cmd_measure(cfg, meas_component, meas_level, sink.stream());
        }
        if (lang->parsed()) {
            auto cfg = make_config(lang_sys, lang_cf);
            cli::OutputSink sink(cfg.out_path);
            std::optional<long> depth;
            if (lang_depth > 0) depth = lang_depth;
            return cli::cmd_language(cfg, lang_level, lang_m, depth, sink.stream());
        }
        if (comp->parsed()) {
            auto cfg = make_config(comp_sys, comp_cf);
            cli::OutputSink sink(cfg.out_path);
            return cli::cmd_complexity(cfg, comp_level, comp_m, sink.stream());
        }
        if (emp->parsed()) {
            auto cfg = make_config(emp_sys, emp_cf);
            cli::OutputSink sink(cfg.out_path);
            std::optional<long> h;
            if (emp_h > 0) h = emp_h;
            return cli::cmd_empirical(cfg, emp_power, cfg.k, h, sink.stream());
        }
        if (ver->parsed()) {
            cli::CheckContext ctx;
            if (!ver_sys.config_path.empty()) ctx.config = load_config(ver_sys.config_path);
            if (!ver_L.empty()) {
                auto dots = ver_L.find("..");
                ctx.zeta_range.clear();
                if (dots == std::string::npos) {
                    ctx.zeta_range.push_back(std::stoi(ver_L));
                } else {
                    int lo = std::stoi(ver_L.substr(0, dots));
                    int hi = std::stoi(ver_L.substr(dots + 2));
                    for (int L = lo; L <= hi; L += 2) ctx.zeta_range.push_back(L);
                }
            }
            return cli::cmd_verify(ver_names, ctx);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUsage;
    } catch (const MaterializationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitUsage;
    }
    return cli::kExitUsage;
}
