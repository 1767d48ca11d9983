#include "plcsim/scenario/compare.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "plcsim/runtime/trace.hpp"

namespace plcsim::scenario {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// JSON pointer of the first divergent leaf, or nullopt when equal.
std::optional<std::string> first_difference(const ojson& a, const ojson& b, const std::string& at) {
  if (a == b) return std::nullopt;
  if (a.is_object() && b.is_object()) {
    for (const auto& [k, v] : a.items()) {
      if (!b.contains(k)) return at + "/" + escape_token(k);
      if (auto d = first_difference(v, b.at(k), at + "/" + escape_token(k))) return d;
    }
    for (const auto& [k, v] : b.items()) {
      if (!a.contains(k)) return at + "/" + escape_token(k);
    }
  }
  if (a.is_array() && b.is_array()) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto d = first_difference(a[i], b[i], at + "/" + std::to_string(i))) return d;
    }
    return at + "/" + std::to_string(n);
  }
  return at;
}

ojson value_at(const ojson& j, const std::string& pointer) {
  const nlohmann::json::json_pointer ptr(pointer);
  const auto plain = nlohmann::json::parse(j.dump());
  return plain.contains(ptr) ? ojson::parse(plain.at(ptr).dump()) : ojson();
}

ojson header_of(const std::vector<std::string>& trace, const char* which) {
  if (trace.empty()) throw std::invalid_argument(std::string("trace ") + which + " is empty");
  auto h = ojson::parse(trace.front());
  if (h.value("format", "") != "plcsim-trace") {
    throw std::invalid_argument(std::string("trace ") + which + " has no plcsim-trace header");
  }
  return h;
}

void collect_errors(const ojson& line, std::set<ErrorKey>& out) {
  for (const auto& r : line.at("errors")) {
    out.emplace(r.at("number").get<int>(), r.at("severity").get<std::string>(), r.at("origin").get<std::string>());
  }
}

}  // namespace

std::string TraceDiff::describe() const {
  if (empty()) return "traces are equivalent";
  std::ostringstream out;
  if (tick) out << "first divergence at tick " << *tick << " field " << field << ": " << value_a << " vs " << value_b;
  auto list = [&](const char* side, const std::vector<ErrorKey>& v) {
    for (const auto& [n, sev, origin] : v) out << "\nerror only in " << side << ": " << n << " " << sev << " " << origin;
  };
  list("a", errors_only_a);
  list("b", errors_only_b);
  return out.str();
}

TraceDiff compare_traces(const std::vector<std::string>& a, const std::vector<std::string>& b, Projection projection) {
  const auto ha = header_of(a, "a");
  const auto hb = header_of(b, "b");
  if (ha.at("scenario") != hb.at("scenario")) {
    throw std::invalid_argument("traces belong to different scenarios: " + ha.at("scenario").get<std::string>() +
                                " and " + hb.at("scenario").get<std::string>());
  }

  TraceDiff diff;
  std::set<ErrorKey> errs_a;
  std::set<ErrorKey> errs_b;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 1; i < n; ++i) {
    std::optional<ojson> la;
    std::optional<ojson> lb;
    if (i < a.size()) la = ojson::parse(a[i]);
    if (i < b.size()) lb = ojson::parse(b[i]);
    if (la) collect_errors(*la, errs_a);
    if (lb) collect_errors(*lb, errs_b);
    if (diff.tick) continue;
    if (!la || !lb) {
      diff.tick = (la ? *la : *lb).at("tick").get<std::int64_t>();
      diff.field = "";
      diff.value_a = la ? "present" : "missing";
      diff.value_b = lb ? "present" : "missing";
      continue;
    }
    const ojson pa = projection == Projection::Behavioral ? behavioral_projection(*la) : *la;
    const ojson pb = projection == Projection::Behavioral ? behavioral_projection(*lb) : *lb;
    if (auto d = first_difference(pa, pb, "")) {
      diff.tick = la->at("tick").get<std::int64_t>();
      diff.field = *d;
      diff.value_a = value_at(pa, *d).dump();
      diff.value_b = value_at(pb, *d).dump();
    }
  }
  for (const auto& e : errs_a) {
    if (!errs_b.count(e)) diff.errors_only_a.push_back(e);
  }
  for (const auto& e : errs_b) {
    if (!errs_a.count(e)) diff.errors_only_b.push_back(e);
  }
  return diff;
}

std::vector<std::string> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trace " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace plcsim::scenario
