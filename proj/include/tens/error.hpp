#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed NASTRAN input. Carries the 1-based line number and the card image.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string card, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what + " [" + card + "]"),
          line_(line), card_(std::move(card)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& card() const noexcept { return card_; }

private:
    std::size_t line_;
    std::string card_;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class MaterialError : public Error {
public:
    using Error::Error;
};

class FemError : public Error {
public:
    using Error::Error;
};

/// Raised when PCG exhausts its iteration budget.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    /// True relative residual after each iteration.
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Schema violation in a scenario config; `pointer` is a JSON pointer to the offending value.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& what)
        : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

/// Wraps an error raised inside one stage of the scenario pipeline.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace tens
