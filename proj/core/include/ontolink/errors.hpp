#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontolink {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed RDF input. Carries the 1-based line of the offending statement.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DuplicateCurie : public Error {
 public:
  explicit DuplicateCurie(const std::string& curie)
      : Error("duplicate CURIE: " + curie), curie_(curie) {}
  const std::string& curie() const noexcept { return curie_; }

 private:
  std::string curie_;
};

class UnknownCurie : public Error {
 public:
  explicit UnknownCurie(const std::string& curie)
      : Error("CURIE not present in the dump: " + curie), curie_(curie) {}
  const std::string& curie() const noexcept { return curie_; }

 private:
  std::string curie_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

/// Transport or protocol failure of an embedding or completion backend.
class ProviderError : public Error {
 public:
  using Error::Error;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("candidate list is empty") {}
};

/// An agent response that holds no parseable JSON object.
class MalformedResponse : public Error {
 public:
  using Error::Error;
};

/// An agent response whose JSON object lacks a required key.
class MissingKey : public MalformedResponse {
 public:
  explicit MissingKey(const std::string& key)
      : MalformedResponse("response is missing key \"" + key + "\""), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class MissingGold : public Error {
 public:
  explicit MissingGold(const std::string& mention)
      : Error("no gold annotation for mention \"" + mention + "\""), mention_(mention) {}
  const std::string& mention() const noexcept { return mention_; }

 private:
  std::string mention_;
};

class EmptyRun : public Error {
 public:
  EmptyRun() : Error("no run records to evaluate") {}
};

class MentionMismatch : public Error {
 public:
  explicit MentionMismatch(std::vector<std::string> mentions);
  const std::vector<std::string>& mentions() const noexcept { return mentions_; }

 private:
  std::vector<std::string> mentions_;
};

}  // namespace ontolink
