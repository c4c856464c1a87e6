#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace raise {

enum class Severity { Error, Warning };

inline const char* to_string(Severity s) {
  return s == Severity::Error ? "Error" : "Warning";
}

/// One validation finding. `code` is a stable rule identifier (GSN001,
/// HAR030, PAT020, ...); `locus` names the offending node, edge, or
/// file row when known.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::string locus;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline Diagnostic err(std::string code, std::string message, std::string locus = {}) {
  return Diagnostic{Severity::Error, std::move(code), std::move(message), std::move(locus)};
}

inline Diagnostic warn(std::string code, std::string message, std::string locus = {}) {
  return Diagnostic{Severity::Warning, std::move(code), std::move(message), std::move(locus)};
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Canonical ordering used by every validator: code, then locus, then message.
inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.code, a.locus, a.message) < std::tie(b.code, b.locus, b.message);
  });
}

inline std::string format_diagnostic(const Diagnostic& d) {
  std::string out = std::string(to_string(d.severity)) + " " + d.code;
  if (!d.locus.empty()) out += " at " + d.locus;
  out += ": " + d.message;
  return out;
}

enum class Errc {
  // graph edits
  UnknownEndpoint,
  KindIncompatible,
  CycleIntroduced,
  DuplicateEdge,
  UnknownEdge,
  DuplicateNode,
  InvalidNode,
  // grafting
  UnknownAttachPoint,
  IdCollision,
  MultiRootSubtree,
  BadPrefix,
  // instantiation
  MissingBinding,
  EmptyCollection,
  PlaceholderFieldUnknown,
  InvalidPattern,
  PatternNotFound,
  // emitters / io
  InvalidGraph,
  IoError,
  TargetNotEmpty,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::UnknownEndpoint: return "UnknownEndpoint";
    case Errc::KindIncompatible: return "KindIncompatible";
    case Errc::CycleIntroduced: return "CycleIntroduced";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::UnknownEdge: return "UnknownEdge";
    case Errc::DuplicateNode: return "DuplicateNode";
    case Errc::InvalidNode: return "InvalidNode";
    case Errc::UnknownAttachPoint: return "UnknownAttachPoint";
    case Errc::IdCollision: return "IdCollision";
    case Errc::MultiRootSubtree: return "MultiRootSubtree";
    case Errc::BadPrefix: return "BadPrefix";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::EmptyCollection: return "EmptyCollection";
    case Errc::PlaceholderFieldUnknown: return "PlaceholderFieldUnknown";
    case Errc::InvalidPattern: return "InvalidPattern";
    case Errc::PatternNotFound: return "PatternNotFound";
    case Errc::InvalidGraph: return "InvalidGraph";
    case Errc::IoError: return "IoError";
    case Errc::TargetNotEmpty: return "TargetNotEmpty";
  }
  return "Unknown";
}

struct Error {
  Errc code = Errc::IoError;
  std::string message;

  std::string to_string() const {
    return std::string(raise::to_string(code)) + ": " + message;
  }
};

/// Value-or-error return for operations with a single failure payload.
template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error error) : v_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

/// Value-or-diagnostics return for parsers and loaders.
template <class T, class D = Diagnostic>
class ParseResult {
 public:
  ParseResult(T value) : v_(std::move(value)) {}
  ParseResult(std::vector<D> diags) : v_(std::move(diags)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  const std::vector<D>& diagnostics() const { return std::get<std::vector<D>>(v_); }

 private:
  std::variant<T, std::vector<D>> v_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

/// Orders ids so numeric runs compare by value: OS2 < OS10, HE9 < HE12.
inline bool natural_less(std::string_view a, std::string_view b) {
  size_t i = 0, j = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      size_t ia = i, jb = j;
      while (ia < a.size() && is_digit(a[ia])) ++ia;
      while (jb < b.size() && is_digit(b[jb])) ++jb;
      std::string_view da = a.substr(i, ia - i), db = b.substr(j, jb - j);
      std::string_view sa = da.substr(std::min(da.find_first_not_of('0'), da.size() - 1));
      std::string_view sb = db.substr(std::min(db.find_first_not_of('0'), db.size() - 1));
      if (sa.size() != sb.size()) return sa.size() < sb.size();
      if (sa != sb) return sa < sb;
      i = ia;
      j = jb;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return (a.size() - i) < (b.size() - j);
}

}  // namespace detail

}  // namespace raise
