#include "app.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "format.hpp"
#include "slc/errors.hpp"
#include "slc/symcurv.hpp"

namespace slc::cli {

namespace {

struct Flag {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
};

struct Sub {
    CLI::App* app = nullptr;
    std::vector<Flag> flags;  // stable addresses after setup: reserved up front
};

std::string flag_name(const std::string& key) {
    std::string s = key;
    for (char& c : s)
        if (c == '_') c = '-';
    return "--" + s;
}

Params load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Params j;
    try {
        j = Params::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto& keys = allowed_keys(command);
    Params out = Params::object();
    for (const auto& [k, v] : j.items()) {
        if (k == "command") {
            if (!v.is_string() || v.get<std::string>() != command) {
                throw ConfigError("config is for a different command");
            }
            continue;
        }
        if (k == "seed") {
            out[k] = v;
            continue;
        }
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw ConfigError("unknown config key '" + k + "' for command " + command);
        }
        out[k] = v;
    }
    return out;
}

void write_header(std::ostream& os, const std::string& command, const Params& params, std::uint64_t seed,
                  const std::string& prefix) {
    os << prefix << "slc-lab " << command << "\n";
    os << prefix << "config_hash: " << hex64(fnv1a(params.dump())) << "\n";
    os << prefix << "seed: " << seed << "\n";
    os << prefix << "tolerances: compare=" << fmt_num(kCompareTol) << " solve=" << fmt_num(kSolveTol) << "\n";
}

nlohmann::json cell_json(const std::string& c) {
    if (c == "true") return true;
    if (c == "false") return false;
    if (c == "nan" || c == "inf" || c == "-inf") return nullptr;
    try {
        std::size_t pos = 0;
        const double v = std::stod(c, &pos);
        if (pos == c.size()) return v;
    } catch (const std::exception&) {
    }
    return c;
}

void emit(std::ostream& os, const std::string& format, const std::string& command, const Params& params,
          std::uint64_t seed, const CommandOutput& res, bool to_file) {
    if (format == "json") {
        nlohmann::json j;
        j["meta"] = {{"command", command},
                     {"config_hash", hex64(fnv1a(params.dump()))},
                     {"seed", seed},
                     {"tolerances", {{"compare", kCompareTol}, {"solve", kSolveTol}}},
                     {"notes", res.notes}};
        j["columns"] = res.table.columns;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : res.table.rows) {
            nlohmann::json jr = nlohmann::json::array();
            for (const auto& c : r) jr.push_back(cell_json(c));
            j["rows"].push_back(jr);
        }
        for (const auto& [k, v] : res.extra.items()) j[k] = v;
        os << j.dump(2) << "\n";
        return;
    }
    if (res.bare_value && !to_file) {
        os << res.table.rows.front().front() << "\n";
        return;
    }
    write_header(os, command, params, seed, "# ");
    for (const auto& n : res.notes) os << "# " << n << "\n";
    for (std::size_t i = 0; i < res.table.columns.size(); ++i) os << (i ? "," : "") << res.table.columns[i];
    os << "\n";
    for (const auto& r : res.table.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"slc-lab: special Lagrangian curvature experiments in hyperbolic space"};
    app.require_subcommand(1);
    std::string config_path, out_path, format = "csv";
    std::uint64_t seed = 0x5eed;
    app.add_option("--config", config_path, "JSON config file; flags override its keys");
    app.add_option("--out", out_path, "write output to this file instead of stdout");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    CLI::Option* seed_opt = app.add_option("--seed", seed, "random seed (kp, verify)");

    const std::map<std::string, std::string> help = {
        {"curv", "special Lagrangian curvature of a symmetric matrix"},
        {"bounds", "distance bounds for a leaf of curvature r"},
        {"solve", "constant-curvature graph solve"},
        {"foliate", "continuation sweep over r"},
        {"kp", "Kulkarni-Pinkall metric of a spherical domain"},
        {"verify", "run the inequality and oracle suite"},
    };
    std::map<std::string, Sub> subs;
    for (const auto& [name, text] : help) {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, text);
        s.app->fallthrough();
        const auto& keys = allowed_keys(name);
        s.flags.reserve(keys.size());
        for (const auto& k : keys) {
            s.flags.push_back({k, "", nullptr});
            Flag& f = s.flags.back();
            f.opt = s.app->add_option(flag_name(k), f.value, k);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::string command;
    for (auto& [name, s] : subs)
        if (s.app->parsed()) command = name;

    try {
        Params params = config_path.empty() ? Params::object() : load_config(config_path, command);
        if (params.contains("seed") && seed_opt->count() == 0) seed = params.at("seed").get<std::uint64_t>();
        params.erase("seed");
        for (const auto& f : subs[command].flags)
            if (f.opt->count() > 0) params[f.key] = f.value;

        CommandOutput res;
        if (command == "curv") res = run_curv(params);
        if (command == "bounds") res = run_bounds(params);
        if (command == "solve") res = run_solve(params);
        if (command == "foliate") res = run_foliate(params);
        if (command == "kp") res = run_kp(params, seed);
        if (command == "verify") res = run_verify(params, seed);

        if (out_path.empty()) {
            emit(out, format, command, params, seed, res, false);
        } else {
            std::ofstream f(out_path);
            if (!f) throw ConfigError("cannot write '" + out_path + "'");
            emit(f, format, command, params, seed, res, true);
        }
        return res.exit_code;
    } catch (const ConvergenceError& e) {
        err << "slc-lab: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << "slc-lab: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "slc-lab: bad config value: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace slc::cli
