#pragma once

#include <string>
#include <vector>

#include "plurilab/current.hpp"

namespace plurilab::currents {

struct FixtureInfo {
    std::string id;
    int n = 2;
    int p = 1;
    SignClass sign_class = SignClass::unknown;
    double domain_radius = 8.0;
    std::string description;
    std::vector<std::string> facts; // closed-form notes
};

const std::vector<FixtureInfo>& fixture_catalog();
bool fixture_exists(const std::string& id);
FixtureInfo fixture_info(const std::string& id);
Current make_fixture(const std::string& id);

} // namespace plurilab::currents
