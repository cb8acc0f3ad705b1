#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "reprof/buffers.hpp"
#include "reprof/netmodel.hpp"
#include "reprof/simulator.hpp"

namespace reprof::io {

using nlohmann::json;

// {links: [id...], flows: [{id, r, b, d, path: [...], class}]}
json network_to_json(const Network& net);
Network network_from_json(const json& j);  // throws InvalidInput, including validate() errors

// links.csv has one column "id"; flows.csv has id,r,b,d,class,path with the
// path joined by ';'. Numbers use the shortest round-trip form.
void write_network_csv(const Network& net, const std::string& links_csv, const std::string& flows_csv);
Network read_network_csv(const std::string& links_csv, const std::string& flows_csv);

// A .json file, a directory holding links.csv and flows.csv, or a flows.csv
// path with links.csv beside it.
Network read_network(const std::string& path);
void write_network(const Network& net, const std::string& path);

struct SolutionDoc {
  std::string method;
  Solution sol;
  std::vector<double> C;
  double W = 0.0;
  json extra = json::object();
};

// {method, W, links: [{id, C}], flows: [{id, D, path, T: [...]}], ...extra}
json solution_to_json(const Network& net, const SolutionDoc& doc);
SolutionDoc solution_from_json(const Network& net, const json& j);

json buffer_report_to_json(const Network& net, const BufferReport& rep);
json sim_report_to_json(const Network& net, const SimReport& rep);

json read_json(const std::string& path);
void write_json(const json& j, const std::string& path);  // "-" for stdout

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace reprof::io
