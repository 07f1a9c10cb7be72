// singtrack <study> [--param value ...] [--config file.json] [--out dir]
// singtrack run --config file.json [--out dir]
// singtrack verify <target> [--param value ...]
// singtrack export --kind trace|lattice|boundary|norms --in artifact.json --out dir
//
// Exit codes: 0 ok, 1 study failed (partial artifacts + failure.json), 2 invalid configuration.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "singtrack/studies/studies.hpp"

namespace fs = std::filesystem;
using namespace singtrack;
using io::json;

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json read_json_file(const std::string& path, const char* what) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::ConfigInvalid, std::string("cannot open ") + what + " '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
    }
}

// "--key value" pairs left over by the parser. Values are JSON when they parse as JSON,
// "re,im" pairs become [re, im], anything else is a string.
json parse_extras(const std::vector<std::string>& extras) {
    json p = json::object();
    for (size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0 || a.size() < 3)
            throw Error(ErrorKind::ConfigInvalid, "unexpected argument '" + a + "'");
        std::string key = a.substr(2), val;
        if (auto eq = key.find('='); eq != std::string::npos) {
            val = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) throw Error(ErrorKind::ConfigInvalid, "missing value for --" + key);
            val = extras[++i];
        }
        for (auto& c : key)
            if (c == '-') c = '_';
        json v = json::parse(val, nullptr, false);
        if (v.is_discarded()) {
            v = val;
            if (auto comma = val.find(','); comma != std::string::npos) {
                json re = json::parse(val.substr(0, comma), nullptr, false);
                json im = json::parse(val.substr(comma + 1), nullptr, false);
                if (re.is_number() && im.is_number()) v = json::array({re, im});
            }
        }
        p[key] = v;
    }
    return p;
}

struct Invocation {
    std::string study;
    json params = json::object();
    std::string out;
    std::uint64_t seed = kDefaultSeed;
};

// Config file {study, parameters, output_dir, seed_rng}; flags override its parameters.
Invocation assemble(std::string study, const std::string& config_path, const json& flag_params, std::string out) {
    Invocation inv;
    json cfg = json::object();
    if (!config_path.empty()) {
        cfg = read_json_file(config_path, "config file");
        if (!cfg.is_object()) throw Error(ErrorKind::ConfigInvalid, "config file '" + config_path + "' must hold an object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it)
            if (it.key() != "study" && it.key() != "parameters" && it.key() != "output_dir" && it.key() != "seed_rng")
                throw Error(ErrorKind::ConfigInvalid,
                            "unknown key '" + it.key() + "' in config file '" + config_path + "'");
    }
    if (cfg.contains("study")) {
        if (!cfg["study"].is_string()) throw Error(ErrorKind::ConfigInvalid, "study must be a string");
        std::string s = cfg["study"];
        if (!study.empty() && s != study)
            throw Error(ErrorKind::ConfigInvalid, "config file names study '" + s + "' but '" + study + "' was requested");
        study = s;
    }
    if (study.empty()) throw Error(ErrorKind::ConfigInvalid, "no study given (config file needs \"study\")");
    json user = cfg.value("parameters", json::object());
    if (!user.is_object()) throw Error(ErrorKind::ConfigInvalid, "parameters must be an object");
    for (auto it = flag_params.begin(); it != flag_params.end(); ++it) user[it.key()] = it.value();
    inv.study = study;
    inv.params = studies::resolve(study, user);
    if (cfg.contains("seed_rng")) {
        if (!cfg["seed_rng"].is_number_unsigned()) throw Error(ErrorKind::ConfigInvalid, "seed_rng must be a nonnegative integer");
        inv.seed = cfg["seed_rng"].get<std::uint64_t>();
    }
    if (out.empty() && cfg.contains("output_dir")) {
        if (!cfg["output_dir"].is_string()) throw Error(ErrorKind::ConfigInvalid, "output_dir must be a string");
        out = cfg["output_dir"];
    }
    inv.out = out.empty() ? "singtrack-" + study : out;
    return inv;
}

int execute(const Invocation& inv) {
    const json resolved = {{"study", inv.study}, {"parameters", inv.params}, {"seed_rng", inv.seed}};
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    studies::StudyOutput out;
    std::string failure;
    ErrorKind failure_kind = ErrorKind::StudyFailed;
    try {
        studies::runner(inv.study)(inv.params, inv.seed, out);
    } catch (const Error& e) {
        failure = e.what();
        failure_kind = e.kind();
    } catch (const std::exception& e) {
        failure = e.what();
    }
    if (!failure.empty() && failure_kind == ErrorKind::ConfigInvalid) {
        std::cerr << "singtrack: " << failure << "\n";
        return 2;
    }
    std::error_code ec;
    fs::create_directories(inv.out, ec);
    if (ec) {
        std::cerr << "singtrack: cannot create output directory '" << inv.out << "': " << ec.message() << "\n";
        return 1;
    }
    if (!failure.empty()) out.add_json("failure.json", {{"study", inv.study}, {"error", failure}, {"kind", to_string(failure_kind)}});
    try {
        for (const auto& f : out.files) io::write_file((fs::path(inv.out) / f.name).string(), f.data);
        io::write_file((fs::path(inv.out) / "manifest.json").string(), io::dump_json(io::manifest_json(resolved, out.files)));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        io::write_file((fs::path(inv.out) / "timestamps.json").string(),
                       json({{"started", started}, {"finished", utc_now()}, {"seconds", secs}, {"targets", out.timing}})
                               .dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "singtrack: " << e.what() << "\n";
        return 1;
    }
    for (const auto& f : out.files) std::cout << (fs::path(inv.out) / f.name).string() << "\n";
    if (!failure.empty()) {
        std::cerr << "singtrack: " << inv.study << " failed: " << failure << "\n";
        return 1;
    }
    if (out.failed_checks) {
        std::cerr << "singtrack: verification failed, see " << (fs::path(inv.out) / "report.json").string() << "\n";
        return 1;
    }
    return 0;
}

int run_export(const std::string& kind, const std::string& in, const std::string& out) {
    json a = read_json_file(in, "artifact");
    std::string csv = io::export_plotdata(a, kind);
    fs::create_directories(out);
    io::write_file((fs::path(out) / (kind + ".csv")).string(), csv);
    std::cout << (fs::path(out) / (kind + ".csv")).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singtrack: singularity tracking studies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(SINGTRACK_VERSION));

    std::string config, out, target, kind, in;
    std::map<std::string, CLI::App*> subs;
    for (const auto& s : studies::study_names()) {
        auto* sc = app.add_subcommand(s, "run the " + s + " study");
        sc->allow_extras();
        sc->add_option("--config", config, "JSON config file");
        sc->add_option("--out", out, "output directory");
        if (s == "verify") sc->add_option("target", target, "check name, 'winding' or 'all'");
        subs[s] = sc;
    }
    auto* run = app.add_subcommand("run", "run the study named in a config file");
    run->add_option("--config", config, "JSON config file")->required();
    run->add_option("--out", out, "output directory");
    auto* exp = app.add_subcommand("export", "plot CSV from a stored artifact");
    exp->add_option("--kind", kind, "trace, lattice, boundary or norms")->required();
    exp->add_option("--in", in, "artifact JSON")->required();
    exp->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (exp->parsed()) return run_export(kind, in, out);
        if (run->parsed()) return execute(assemble("", config, json::object(), out));
        for (auto& [name, sc] : subs) {
            if (!sc->parsed()) continue;
            json flags = parse_extras(sc->remaining());
            if (!target.empty()) flags["target"] = target;
            return execute(assemble(name, config, flags, out));
        }
    } catch (const Error& e) {
        std::cerr << "singtrack: " << e.what() << "\n";
        return e.kind() == ErrorKind::ConfigInvalid || e.kind() == ErrorKind::UnknownArtifact ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "singtrack: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
