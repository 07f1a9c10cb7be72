// One PASS/FAIL line per acceptance criterion; failing checks are listed underneath.
// Usage: acceptance [target ...] [--report file.json]

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "singtrack/verify/checks.hpp"

using namespace singtrack;

int main(int argc, char** argv) {
    std::vector<const AcceptanceTarget*> run;
    std::string report;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--report" && i + 1 < argc) {
            report = argv[++i];
        } else if (auto* t = find_target(a)) {
            run.push_back(t);
        } else {
            std::fprintf(stderr, "unknown target: %s\n", a.c_str());
            return 2;
        }
    }
    if (run.empty())
        for (const auto& t : acceptance_targets()) run.push_back(&t);

    bool all = true;
    json out = json::array();
    for (const auto* t : run) {
        auto r = run_target(*t);
        all = all && r.pass();
        std::printf("%s  criterion %2d  %-22s %s (%.2f s%s)\n", r.pass() ? "PASS" : "FAIL", t->id, t->name, t->title,
                    r.seconds, r.within_time() ? "" : ", over the time limit");
        if (!r.error.empty()) std::printf("      error: %s\n", r.error.c_str());
        for (const auto& c : r.checks)
            if (!c.pass)
                std::printf("      %s: value %s target %s tolerance %g\n", c.name.c_str(), c.value.dump().c_str(),
                            c.target.dump().c_str(), c.tolerance);
        std::fflush(stdout);
        out.push_back(to_json(r));
    }
    if (!report.empty()) std::ofstream(report) << out.dump(2) << "\n";
    return all ? 0 : 1;
}
