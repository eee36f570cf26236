// One line per criterion; exit status is nonzero if any fails.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <string>

#include "qdcca/suites.hpp"

int main(int argc, char **argv) {
    qdcca::SuiteOptions opt;
    std::string report_dir;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (arg == "--seed" && i + 1 < argc) {
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (arg == "--reports" && i + 1 < argc) {
            report_dir = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N] [--seed S] [--reports DIR]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (int c = 1; c <= 9; ++c) {
        if (only != 0 && c != only) {
            continue;
        }
        try {
            const auto r = qdcca::run_criterion(c, opt);
            std::printf("[%s] criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", c, r.name.c_str(),
                        r.summary.c_str());
            if (!report_dir.empty()) {
                std::ofstream(report_dir + "/" + r.name + ".json") << r.report_json;
            }
            failed += r.pass ? 0 : 1;
        } catch (const std::exception &ex) {
            std::printf("[FAIL] criterion %d: exception: %s\n", c, ex.what());
            ++failed;
        }
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
