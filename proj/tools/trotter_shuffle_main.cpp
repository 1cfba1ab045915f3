#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/experiment.hpp"

namespace ts = trotter_shuffle;

namespace {

constexpr int exit_config  = 2;
constexpr int exit_runtime = 3;

std::vector<std::size_t> parse_n_list(const std::vector<std::string> &parts) {
    std::vector<std::size_t> out;
    for(const auto &part : parts) {
        std::stringstream ss(part);
        std::string       item;
        while(std::getline(ss, item, ',')) {
            if(item.empty()) continue;
            std::size_t pos = 0;
            long long   v   = 0;
            try {
                v = std::stoll(item, &pos);
            } catch(const std::exception &) { pos = 0; }
            if(pos != item.size() || v < 1) throw ts::ConfigError("--n: '" + item + "' is not a positive integer");
            out.push_back(static_cast<std::size_t>(v));
        }
    }
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Randomized Lie-Trotter product experiments", "trotter-shuffle"};
    app.set_version_flag("--version", ts::version);

    std::string              kind, config_path, sigma, out;
    std::vector<std::string> n_values;
    std::optional<long long> d, trials;
    std::optional<std::uint64_t> seed;
    std::optional<double>    eps;

    app.add_option("kind", kind, "converge | tail | regime | words | evolution")
        ->required()
        ->check(CLI::IsMember({"converge", "tail", "regime", "words", "evolution"}));
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--n", n_values, "row lengths, comma separated or repeated");
    app.add_option("--d", d, "matrix dimension");
    app.add_option("--trials", trials, "trials per n");
    app.add_option("--seed", seed, "64-bit seed");
    app.add_option("--eps", eps, "deviation threshold");
    app.add_option("--sigma", sigma, "permutation mode")->check(CLI::IsMember({"random", "identity"}));
    app.add_option("--out", out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    ts::ExperimentConfig config;
    try {
        std::ifstream in(config_path);
        if(!in) throw ts::ConfigError("--config: cannot open '" + config_path + "'");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch(const nlohmann::json::parse_error &e) {
            throw ts::ConfigError("--config: " + config_path + ": " + e.what());
        }
        if(!doc.is_object()) throw ts::ConfigError("config: expected a JSON object");
        if(doc.contains("kind") && doc["kind"] != kind)
            throw ts::ConfigError("kind: command line says '" + kind + "', config says " + doc["kind"].dump());
        doc["kind"] = kind;
        if(!n_values.empty()) doc["n_list"] = parse_n_list(n_values);
        if(d) {
            if(*d < 1) throw ts::ConfigError("--d: must be positive");
            doc["d"] = *d;
        }
        if(trials) {
            if(*trials < 1) throw ts::ConfigError("--trials: must be at least 1");
            doc["trials"] = *trials;
        }
        if(seed) doc["seed"] = *seed;
        if(eps) doc["eps"] = *eps;
        if(!sigma.empty()) doc["sigma_mode"] = sigma;
        if(!out.empty()) doc["out_path"] = out;
        config = ts::ExperimentConfig::from_json(doc);
        if(config.out_path.empty()) throw ts::ConfigError("out_path: required (config or --out)");
    } catch(const ts::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        const auto report = ts::run(config);
        ts::emit(report, config.out_path);
        for(const auto &s : report.summary)
            std::cout << "n=" << s.n << ' ' << s.metric << " median=" << s.median << " p05=" << s.p05 << " p95=" << s.p95 << '\n';
        std::cout << "wrote " << config.out_path.string() << '\n';
    } catch(const ts::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch(const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return 0;
}
