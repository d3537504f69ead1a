#pragma once

// Minimal TOML reader covering the flat config schema: comments, [section]
// and [a.b] headers, bare keys with string / number / boolean / homogeneous
// array values. Produces the same json document the JSON front end yields,
// so the rest of the harness has a single schema path.

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mixedsde::harness {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline nlohmann::json parse_toml_scalar(const std::string& raw, std::size_t line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw std::runtime_error("toml: empty value at line " + std::to_string(line_no));
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw std::runtime_error("toml: unterminated string at line " + std::to_string(line_no));
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        switch (v[i]) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: out.push_back(v[i]);
        }
      } else {
        out.push_back(v[i]);
      }
    }
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t used = 0;
    if (v.find_first_of(".eEinf") == std::string::npos) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return i;
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (...) {
  }
  throw std::runtime_error("toml: cannot parse value '" + v + "' at line " +
                           std::to_string(line_no));
}

}  // namespace detail

inline nlohmann::json parse_toml(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* section = &root;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos && line.find('"', 0) > hash) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("toml: malformed section at line " + std::to_string(line_no));
      }
      std::string name = detail::trim(line.substr(1, line.size() - 2));
      section = &root;
      std::size_t start = 0;
      while (true) {
        const std::size_t dot = name.find('.', start);
        const std::string part =
            detail::trim(name.substr(start, dot == std::string::npos ? std::string::npos
                                                                     : dot - start));
        if (part.empty()) {
          throw std::runtime_error("toml: empty section name at line " + std::to_string(line_no));
        }
        section = &(*section)[part];
        if (!section->is_object()) *section = nlohmann::json::object();
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("toml: expected key = value at line " + std::to_string(line_no));
    }
    const std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("toml: empty key at line " + std::to_string(line_no));
    }
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') {
        throw std::runtime_error("toml: unterminated array at line " + std::to_string(line_no));
      }
      nlohmann::json arr = nlohmann::json::array();
      std::string inner = value.substr(1, value.size() - 2);
      std::size_t start = 0;
      while (start <= inner.size()) {
        std::size_t comma = inner.find(',', start);
        std::string item = inner.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!detail::trim(item).empty()) {
          arr.push_back(detail::parse_toml_scalar(item, line_no));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      (*section)[key] = std::move(arr);
    } else {
      (*section)[key] = detail::parse_toml_scalar(value, line_no);
    }
  }
  return root;
}

/// Dispatch on content: a leading '{' means JSON, anything else TOML.
inline nlohmann::json parse_config_text(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return nlohmann::json::parse(text);
    break;
  }
  return parse_toml(text);
}

}  // namespace mixedsde::harness
