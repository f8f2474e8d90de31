#pragma once

#include <vector>

#include "provis/view.hpp"

namespace provis {

/// Shared preparation over the flight tables: flights of active airlines
/// joined with their departure airport, projected to
/// (state, city, alid, ddelay, adelay, y, m, d, delay_bin).
WorkflowDef flight_prep();

/// The six-view dashboard: a choropleth of flight counts per state and bar
/// charts of counts by airline, departure-delay bin, day, month, and year.
std::vector<ViewDef> flight_dashboard();

/// Choropleth of flight counts per departure state (Q1, S, M).
ViewDef state_map();
/// Bar chart of flight counts grouped by one prep column.
ViewDef count_bars(const std::string& id, const std::string& key);
/// One circle per state at (avg_ddelay, avg_adelay).
ViewDef delay_scatter();
/// Airports of the selected states (query D).
ViewDef airports_detail();
/// Flight counts per city for the selected states (query Z).
ViewDef city_detail();

}  // namespace provis
