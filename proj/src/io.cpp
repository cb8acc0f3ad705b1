#include "reprof/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reprof/errors.hpp"

namespace reprof::io {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InvalidInput(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(where + ": bad type for '" + key + "'");
  }
}

void check_valid(const Network& net) {
  const auto errs = validate(net);
  if (errs.empty()) return;
  std::string msg = "invalid network:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw InvalidInput(msg);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidInput("not a number: '" + s + "'");
  return v;
}

json network_to_json(const Network& net) {
  json flows = json::array();
  for (const auto& f : net.flows) {
    json jf{{"id", f.id}, {"r", f.r}, {"b", f.b}, {"d", f.d}, {"path", f.path}};
    if (!f.class_label.empty()) jf["class"] = f.class_label;
    flows.push_back(std::move(jf));
  }
  return json{{"links", net.links}, {"flows", flows}};
}

Network network_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("network document must be an object");
  Network net;
  net.links = field<std::vector<std::string>>(j, "links", "network");
  const json& flows = j.contains("flows") ? j.at("flows") : json::array();
  if (!flows.is_array()) throw InvalidInput("network: 'flows' must be an array");
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const json& jf = flows[k];
    const std::string where = "flow #" + std::to_string(k);
    FlowProfile f;
    f.id = field<std::string>(jf, "id", where);
    f.r = field<double>(jf, "r", where);
    f.b = field<double>(jf, "b", where);
    f.d = field<double>(jf, "d", where);
    f.path = field<std::vector<std::string>>(jf, "path", where);
    if (jf.contains("class")) f.class_label = field<std::string>(jf, "class", where);
    net.flows.push_back(std::move(f));
  }
  check_valid(net);
  return net;
}

void write_network_csv(const Network& net, const std::string& links_csv, const std::string& flows_csv) {
  std::ofstream lo(links_csv), fo(flows_csv);
  if (!lo || !fo) throw InvalidInput("cannot write CSV network files");
  lo << "id\n";
  for (const auto& l : net.links) lo << l << "\n";
  fo << "id,r,b,d,class,path\n";
  for (const auto& f : net.flows) {
    fo << f.id << "," << format_double(f.r) << "," << format_double(f.b) << "," << format_double(f.d)
       << "," << f.class_label << ",";
    for (std::size_t h = 0; h < f.path.size(); ++h) fo << (h ? ";" : "") << f.path[h];
    fo << "\n";
  }
}

Network read_network_csv(const std::string& links_csv, const std::string& flows_csv) {
  Network net;
  const auto links = read_lines(links_csv);
  if (links.empty() || links[0] != "id") throw InvalidInput(links_csv + ": header must be 'id'");
  net.links.assign(links.begin() + 1, links.end());
  const auto flows = read_lines(flows_csv);
  if (flows.empty() || flows[0] != "id,r,b,d,class,path")
    throw InvalidInput(flows_csv + ": header must be 'id,r,b,d,class,path'");
  for (std::size_t k = 1; k < flows.size(); ++k) {
    const auto c = split(flows[k], ',');
    if (c.size() != 6) throw InvalidInput(flows_csv + " line " + std::to_string(k + 1) + ": expected 6 columns");
    FlowProfile f;
    f.id = c[0];
    f.r = parse_double(c[1]);
    f.b = parse_double(c[2]);
    f.d = parse_double(c[3]);
    f.class_label = c[4];
    f.path = split(c[5], ';');
    net.flows.push_back(std::move(f));
  }
  check_valid(net);
  return net;
}

Network read_network(const std::string& path) {
  const fs::path p(path);
  if (fs::is_directory(p)) return read_network_csv((p / "links.csv").string(), (p / "flows.csv").string());
  if (p.extension() == ".csv") return read_network_csv((p.parent_path() / "links.csv").string(), path);
  return network_from_json(read_json(path));
}

void write_network(const Network& net, const std::string& path) {
  const fs::path p(path);
  if (p.extension() == ".json" || path == "-") {
    write_json(network_to_json(net), path);
    return;
  }
  fs::create_directories(p);
  write_network_csv(net, (p / "links.csv").string(), (p / "flows.csv").string());
}

json solution_to_json(const Network& net, const SolutionDoc& doc) {
  json links = json::array();
  for (std::size_t j = 0; j < net.links.size(); ++j)
    links.push_back({{"id", net.links[j]}, {"C", j < doc.C.size() ? doc.C[j] : 0.0}});
  json flows = json::array();
  for (std::size_t i = 0; i < net.flows.size(); ++i)
    flows.push_back({{"id", net.flows[i].id},
                     {"D", doc.sol.D[i]},
                     {"path", net.flows[i].path},
                     {"T", doc.sol.T[i]}});
  json j = doc.extra.is_object() ? doc.extra : json::object();
  j["method"] = doc.method;
  j["W"] = doc.W;
  j["links"] = links;
  j["flows"] = flows;
  return j;
}

SolutionDoc solution_from_json(const Network& net, const json& j) {
  SolutionDoc doc;
  if (!j.is_object()) throw InvalidInput("solution document must be an object");
  doc.method = j.value("method", "");
  doc.W = j.value("W", 0.0);
  const auto& flows = j.at("flows");
  if (flows.size() != net.flows.size()) throw InvalidInput("solution flow count does not match the network");
  for (std::size_t i = 0; i < net.flows.size(); ++i) {
    const std::string where = "solution flow #" + std::to_string(i);
    if (field<std::string>(flows[i], "id", where) != net.flows[i].id)
      throw InvalidInput(where + ": id does not match the network");
    doc.sol.D.push_back(field<double>(flows[i], "D", where));
    doc.sol.T.push_back(field<std::vector<double>>(flows[i], "T", where));
    if (doc.sol.T.back().size() != net.flows[i].path.size())
      throw InvalidInput(where + ": one T per hop required");
  }
  if (j.contains("links")) {
    const auto& links = j.at("links");
    if (links.size() != net.links.size()) throw InvalidInput("solution link count does not match the network");
    for (std::size_t k = 0; k < links.size(); ++k) {
      if (field<std::string>(links[k], "id", "solution link") != net.links[k])
        throw InvalidInput("solution link order does not match the network");
      doc.C.push_back(field<double>(links[k], "C", "solution link"));
    }
  }
  return doc;
}

json buffer_report_to_json(const Network& net, const BufferReport& rep) {
  json links = json::array();
  for (std::size_t j = 0; j < net.links.size(); ++j)
    links.push_back({{"id", net.links[j]}, {"scheduling", rep.scheduling[j]}, {"total", rep.link_total[j]}});
  json flows = json::array();
  for (std::size_t i = 0; i < net.flows.size(); ++i)
    flows.push_back({{"id", net.flows[i].id}, {"ingress", rep.ingress[i]}, {"reprofiling", rep.reprofiling[i]}});
  return json{{"links", links}, {"flows", flows}, {"total", rep.total}};
}

json sim_report_to_json(const Network& net, const SimReport& rep) {
  json flows = json::array();
  for (std::size_t i = 0; i < rep.max_delay.size(); ++i)
    flows.push_back({{"id", net.flows[i].id},
                     {"max_delay", rep.max_delay[i]},
                     {"delay_bound", rep.delay_bound[i]},
                     {"max_ingress_backlog", rep.max_ingress_backlog[i]},
                     {"max_reprofiler_backlog", rep.max_reprofiler_backlog[i]}});
  json links = json::array();
  for (std::size_t j = 0; j < rep.max_link_backlog.size(); ++j)
    links.push_back({{"id", net.links[j]},
                     {"max_backlog", rep.max_link_backlog[j]},
                     {"max_rate", rep.max_link_served[j]}});
  return json{{"step", rep.step},      {"horizon", rep.horizon}, {"steps", rep.steps},
              {"ok", rep.ok()},        {"violations", rep.violations},
              {"flows", flows},        {"links", links}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace reprof::io
