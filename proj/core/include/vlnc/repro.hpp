#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vlnc {

struct ReproResult {
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct ReproRow {
    std::string id;    // "A1".."A8"
    std::string claim; // one-line description
    std::function<ReproResult()> run;
};

// The workbench's reproduction checklist: every row re-derives one published
// behaviour of the stock networks from scratch and reports pass/fail.
const std::vector<ReproRow>& acceptance_suite();

} // namespace vlnc
