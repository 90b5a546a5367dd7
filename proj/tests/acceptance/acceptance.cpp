// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [fast|full]   (default full)

#include <iostream>
#include <string>

#include "qbrel/verify.hpp"

int main(int argc, char** argv) {
    const std::string level = argc > 1 ? argv[1] : "full";
    qbrel::VerifyLevel lvl;
    try {
        lvl = qbrel::parse_verify_level(level);
    } catch (const qbrel::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    const auto report = qbrel::verify_suite(lvl, [](const qbrel::CriterionResult& c) {
        std::cout << qbrel::summary_line(c) << "\n";
        for (const auto& note : c.notes) std::cout << "    " << note << "\n";
        std::cout.flush();
    });
    int failed = 0;
    for (const auto& c : report.criteria) failed += c.passed ? 0 : 1;
    std::cout << report.criteria.size() - failed << "/" << report.criteria.size() << " criteria passed ("
              << report.seconds << " s)\n";
    return failed == 0 ? 0 : 1;
}
