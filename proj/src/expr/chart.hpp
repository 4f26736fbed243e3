#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srmin::expr {

/* An ordered list of coordinate names. Expressions refer to coordinates by
   index; the chart supplies the name <-> index mapping for parsing and
   printing. Names must be distinct, non-empty identifiers. */
class Chart {
public:
  Chart() = default;

  explicit Chart(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty())
        throw std::invalid_argument("chart: empty coordinate name");
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw std::invalid_argument("chart: duplicate coordinate name '" +
                                      names_[i] + "'");
    }
  }

  std::size_t dim() const { return names_.size(); }

  const std::string& name(std::size_t i) const { return names_.at(i); }

  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }

private:
  std::vector<std::string> names_;
};

}  // namespace srmin::expr
