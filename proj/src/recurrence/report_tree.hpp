#pragma once

#include <json.hpp>

#include "plab/recurrence.hpp"

namespace plab::recurrence {

nlohmann::json number(double v);
nlohmann::json window_tree(const Window& w);
nlohmann::json grid_tree(const TauGrid& g);
nlohmann::json report_tree(const RecurrenceReport& report);
nlohmann::json profile_tree(const ComparabilityProfile& profile);
nlohmann::json returns_tree(const ReturnSequence& seq);

}  // namespace plab::recurrence
