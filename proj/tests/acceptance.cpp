// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "gramlab/verify.hpp"

#include <cstdio>
#include <exception>

using namespace gramlab;

int main() {
    struct Criterion {
        const char* label;
        const char* suite;
    };
    const Criterion criteria[] = {
        {"mixture-noise replication", "mixture"},
        {"exact rate, independent noise", "rate"},
        {"rate mismatch, two-radius design", "rate-mismatch"},
        {"coverage of the directional bound", "coverage"},
        {"solver vs bisection oracle", "solver"},
        {"dual QP vs brute-force oracle", "qp"},
        {"constant suite", "constants"},
        {"property suites", "properties"},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        bool ok = false;
        std::string detail;
        double seconds = 0.0;
        try {
            const SuiteResult r = run_suite(c.suite);
            ok = r.passed();
            detail = r.summary();
            seconds = r.runtime_seconds;
        } catch (const std::exception& e) {
            detail = std::string("error: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("%s %s: %s [%.1fs]\n", ok ? "PASS" : "FAIL", c.label, detail.c_str(), seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
