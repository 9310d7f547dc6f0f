#include <getopt.h>

#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "attnspec/experiments.hpp"

namespace {

using namespace attnspec;

void usage() {
    std::cerr <<
        "usage: attnspec <command> [options]\n"
        "\n"
        "commands:\n"
        "  spectrum   sample model spectra and write CSV summaries\n"
        "  theory     limit-law edge, moments and density for one parameter point\n"
        "  figures    canned presets: six-models | topk | balance | poisson\n"
        "  verify     self-check suites: interlacing | concentration | bounds | theory | all\n"
        "  rerun      replay a manifest.json byte-for-byte\n"
        "\n"
        "common options:\n"
        "  --d N --ell N --dqk N   dimensions (default 1000, ell defaults to d)\n"
        "  --beta X                inverse temperature (default 1.0)\n"
        "  --seeds N               number of samples (default 10)\n"
        "  --seed N                master seed (default 42)\n"
        "  --c X --delta X         degree constant and concentration exponent\n"
        "  --top-k N               outliers removed from the bulk (default 3)\n"
        "  --bin-width X           histogram bin width (default 0.1)\n"
        "  --threads N             sample-level worker threads (default 1)\n"
        "  --out DIR               output directory (default $ATTNSPEC_OUT or ./out)\n"
        "\n"
        "spectrum:  --models A,Aperp,Y,Yf,YQ,YQlin,Yflin   --dump-matrices\n"
        "theory:    --a X --b X (instead of --beta)        --points N\n"
        "figures:   --preset NAME\n"
        "verify:    --suite NAME\n"
        "rerun:     --manifest FILE\n";
}

std::string default_out() {
    const char* env = std::getenv("ATTNSPEC_OUT");
    return env ? env : "./out";
}

int parse_int(const char* flag, const std::string& text) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size())
        throw std::invalid_argument(std::string("--") + flag + " expects an integer, got '" +
                                    text + "'");
    return value;
}

double parse_double(const char* flag, const std::string& text) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size())
        throw std::invalid_argument(std::string("--") + flag + " expects a number, got '" +
                                    text + "'");
    return value;
}

unsigned long long parse_u64(const char* flag, const std::string& text) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != text.size())
        throw std::invalid_argument(std::string("--") + flag + " expects an unsigned integer, got '" +
                                    text + "'");
    return value;
}

struct CliArgs {
    RunOptions run;
    TheoryOptions theory;
    std::string out = default_out();
    std::string preset, suite = "all", manifest;
    bool ell_set = false, beta_set = false, d_set = false, seeds_set = false;
    bool a_set = false, b_set = false;
};

bool parse_args(int argc, char** argv, CliArgs& args) {
    enum {
        kD = 1000, kEll, kDqk, kBeta, kSeeds, kSeed, kC, kDelta, kTopK, kBinWidth,
        kOut, kThreads, kModels, kDump, kA, kB, kPoints, kPreset, kSuite, kManifest
    };
    static const option longopts[] = {
        {"d", required_argument, nullptr, kD},
        {"ell", required_argument, nullptr, kEll},
        {"dqk", required_argument, nullptr, kDqk},
        {"beta", required_argument, nullptr, kBeta},
        {"seeds", required_argument, nullptr, kSeeds},
        {"seed", required_argument, nullptr, kSeed},
        {"c", required_argument, nullptr, kC},
        {"delta", required_argument, nullptr, kDelta},
        {"top-k", required_argument, nullptr, kTopK},
        {"bin-width", required_argument, nullptr, kBinWidth},
        {"out", required_argument, nullptr, kOut},
        {"threads", required_argument, nullptr, kThreads},
        {"models", required_argument, nullptr, kModels},
        {"dump-matrices", no_argument, nullptr, kDump},
        {"a", required_argument, nullptr, kA},
        {"b", required_argument, nullptr, kB},
        {"points", required_argument, nullptr, kPoints},
        {"preset", required_argument, nullptr, kPreset},
        {"suite", required_argument, nullptr, kSuite},
        {"manifest", required_argument, nullptr, kManifest},
        {nullptr, 0, nullptr, 0}};

    double a = 0, b = 0;
    optind = 1;
    int opt;
    while ((opt = getopt_long(argc, argv, "", longopts, nullptr)) != -1) {
        switch (opt) {
            case kD: args.run.config.d = parse_int("d", optarg); args.d_set = true; break;
            case kEll: args.run.config.ell = parse_int("ell", optarg); args.ell_set = true; break;
            case kDqk: args.run.config.d_qk = parse_int("dqk", optarg); break;
            case kBeta:
                args.run.config.beta = parse_double("beta", optarg);
                args.theory.beta = args.run.config.beta;
                args.beta_set = true;
                break;
            case kSeeds: args.run.num_samples = parse_int("seeds", optarg); args.seeds_set = true; break;
            case kSeed: args.run.config.master_seed.value = parse_u64("seed", optarg); break;
            case kC: args.run.config.c = parse_double("c", optarg); break;
            case kDelta: args.run.config.delta = parse_double("delta", optarg); break;
            case kTopK: args.run.top_k = parse_int("top-k", optarg); break;
            case kBinWidth: args.run.bin_width = parse_double("bin-width", optarg); break;
            case kOut: args.out = optarg; break;
            case kThreads: args.run.threads = parse_int("threads", optarg); break;
            case kModels: {
                std::string list = optarg;
                std::size_t pos = 0;
                while (pos != std::string::npos) {
                    const std::size_t comma = list.find(',', pos);
                    const std::string name = list.substr(
                        pos, comma == std::string::npos ? comma : comma - pos);
                    if (!name.empty()) args.run.models.push_back(parse_model_kind(name));
                    pos = (comma == std::string::npos) ? comma : comma + 1;
                }
                break;
            }
            case kDump: args.run.dump_matrices = true; break;
            case kA: a = parse_double("a", optarg); args.a_set = true; break;
            case kB: b = parse_double("b", optarg); args.b_set = true; break;
            case kPoints: args.theory.grid.points = parse_int("points", optarg); break;
            case kPreset: args.preset = optarg; break;
            case kSuite: args.suite = optarg; break;
            case kManifest: args.manifest = optarg; break;
            default: return false;
        }
    }
    if (args.a_set != args.b_set) {
        std::cerr << "error: --a and --b must be given together\n";
        return false;
    }
    if (args.a_set) args.theory.ab = std::make_pair(a, b);
    if (args.d_set && !args.ell_set) args.run.config.ell = args.run.config.d;
    return optind >= argc;  // no stray positional arguments
}

void warn_large_beta(double beta) {
    if (beta > 3.0)
        std::cerr << "warning: beta = " << beta
                  << " is far outside the O(1) regime the limit theory covers; "
                     "expect the discrete large-beta behavior instead\n";
}

int main_spectrum(CliArgs& args) {
    warn_large_beta(args.run.config.beta);
    const ExperimentManifest manifest = run_spectrum(args.run, args.out);
    std::cout << "spectrum: wrote " << manifest.outputs.size() << " files to " << args.out
              << " (" << manifest.wall_clock_seconds << " s)\n";
    return 0;
}

int main_theory(CliArgs& args) {
    if (!args.theory.ab) warn_large_beta(args.theory.beta);
    const ExperimentManifest manifest = run_theory(args.theory, args.out);
    std::cout << "theory: wrote " << manifest.outputs.size() << " files to " << args.out << "\n";
    return 0;
}

int main_figures(CliArgs& args) {
    if (args.preset.empty()) {
        std::cerr << "error: figures needs --preset\n";
        return 2;
    }
    if (args.preset == "poisson" && !args.beta_set) args.run.config.beta = 50.0;
    if (args.preset == "poisson" && !args.seeds_set) args.run.num_samples = 10;
    const ExperimentManifest manifest = run_figure(args.preset, args.run, args.out);
    std::cout << "figures " << args.preset << ": wrote " << manifest.outputs.size()
              << " files to " << args.out << "\n";
    return 0;
}

int main_verify(CliArgs& args) {
    const VerifyReport report = run_verify(args.suite, args.out);
    for (const auto& check : report.checks)
        std::cout << (check.pass ? "PASS" : "FAIL") << " " << check.name << ": " << check.detail
                  << "\n";
    std::cout << "verify " << args.suite << ": " << (report.pass ? "PASS" : "FAIL") << "\n";
    return report.pass ? 0 : 1;
}

int main_rerun(CliArgs& args) {
    if (args.manifest.empty()) {
        std::cerr << "error: rerun needs --manifest\n";
        return 2;
    }
    const ExperimentManifest manifest = rerun(args.manifest, args.out);
    std::cout << "rerun " << manifest.experiment << ": wrote " << manifest.outputs.size()
              << " files to " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage();
        return 2;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        usage();
        return 0;
    }
    CliArgs args;
    try {
        if (!parse_args(argc - 1, argv + 1, args)) {
            usage();
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        if (cmd == "spectrum") return main_spectrum(args);
        if (cmd == "theory") return main_theory(args);
        if (cmd == "figures") return main_figures(args);
        if (cmd == "verify") return main_verify(args);
        if (cmd == "rerun") return main_rerun(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "unknown command: " << cmd << "\n";
    usage();
    return 2;
}
