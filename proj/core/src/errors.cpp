#include "commex/errors.hpp"

namespace commex {

UnknownNode::UnknownNode(std::size_t node, std::size_t n_nodes)
    : Error("unknown node " + std::to_string(node) + " (graph has " +
            std::to_string(n_nodes) + " nodes)") {}

BudgetExhausted::BudgetExhausted(std::size_t budget)
    : Error("query budget of " + std::to_string(budget) + " exhausted") {}

DuplicateQuery::DuplicateQuery(std::size_t node)
    : Error("node " + std::to_string(node) + " was already queried") {}

ParseError::ParseError(const std::filesystem::path& file, std::size_t line,
                       const std::string& what)
    : Error(file.string() + ":" + std::to_string(line) + ": " + what),
      file_(file),
      line_(line) {}

MissingFile::MissingFile(const std::filesystem::path& file)
    : Error("missing file: " + file.string()) {}

NonFiniteLoss::NonFiniteLoss(std::size_t epoch, double value)
    : Error("loss became non-finite (" + std::to_string(value) +
            ") at epoch " + std::to_string(epoch)) {}

NoCandidates::NoCandidates() : Error("every node has already been queried") {}

}  // namespace commex
