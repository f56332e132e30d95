// centerdepth: scene generation, center-depth refinement, evaluation and BEV planning.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "centerdepth/config.hpp"
#include "centerdepth/pipeline.hpp"

namespace cfgns = centerdepth::config;

int main(int argc, char** argv) {
    CLI::App app{"Center-point depth refinement pipeline"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string input;
    long long seed = -1;
    bool print_config = false;

    app.add_option("--config", config_path, "JSON config file; empty file means defaults");
    app.add_option("--seed", seed, "Global seed")->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "Parent directory for run directories");
    app.add_option("--input", input, "Dataset dir (refine), pairs.jsonl (eval), obstacles.jsonl (plan)");
    app.add_option("--override", overrides, "key=value, dotted path or unique field name")
        ->take_all();
    app.add_flag("--print-config", print_config, "Print the resolved config to stdout");

    const std::map<std::string, std::string> about{
        {"gen", "Generate a synthetic dataset"},
        {"refine", "Refine center depths for a dataset (--input DIR)"},
        {"eval", "Score a pairs.jsonl file (--input FILE)"},
        {"plan", "Plan a BEV path around obstacles (--input obstacles.jsonl)"},
        {"demo", "gen, refine, eval and plan in one run directory"}};
    for (const auto& cmd : centerdepth::pipeline::commands()) app.add_subcommand(cmd, about.at(cmd));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    if (!out_dir.empty()) overrides.push_back("out=" + nlohmann::json(out_dir).dump());
    if (!input.empty()) overrides.push_back("input=" + nlohmann::json(input).dump());

    cfgns::RunConfig cfg;
    try {
        cfg = cfgns::load(config_path, overrides);
    } catch (const centerdepth::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (print_config) std::cout << cfgns::to_json(cfg).dump(2) << '\n';

    const std::string command = app.get_subcommands().front()->get_name();
    return centerdepth::pipeline::run(command, cfg, std::cerr).exit_code;
}
