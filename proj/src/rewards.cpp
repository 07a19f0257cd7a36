#include "regretsim/rewards.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace regretsim {

namespace {

bool in_unit_interval(const Vector& v) {
  return (v.array() >= 0.0).all() && (v.array() <= 1.0).all();
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, int row) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' ||
                          *(end - 1) == '\r')) {
    --end;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw parse_error("non-numeric cell '" + cell + "' in row " +
                          std::to_string(row),
                      row);
  }
  return value;
}

}  // namespace

void RewardSchedule::validate(double horizon) const {
  if (breakpoints.size() != values.size() || breakpoints.empty()) {
    throw std::domain_error("schedule must have one value per breakpoint");
  }
  if (breakpoints.front() != 0.0) {
    throw std::domain_error("schedule must cover t = 0");
  }
  const int d = dim();
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw std::domain_error("schedule breakpoints must be strictly ascending");
    }
    if (breakpoints[i] >= horizon) {
      throw std::domain_error("schedule breakpoints must lie before the horizon");
    }
    if (int(values[i].size()) != d || !in_unit_interval(values[i])) {
      throw std::domain_error("schedule values must lie in [0,1]^d");
    }
  }
}

RewardSchedule load_schedule(const std::string& csv_text) {
  std::stringstream ss(csv_text);
  std::string line;
  int row = 0;

  if (!std::getline(ss, line)) {
    throw parse_error("schedule must cover t = 0 (empty input)", 0);
  }
  ++row;
  auto header = split_csv_row(line);
  if (header.empty() || header.front() != "t") {
    throw parse_error("header must start with 't'", row);
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    std::string cell = header[i];
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (cell != "r_" + std::to_string(i)) {
      throw parse_error("header column " + std::to_string(i + 1) +
                            " must be r_" + std::to_string(i),
                        row);
    }
  }
  const int d = int(header.size()) - 1;
  if (d < 1) throw parse_error("schedule must have at least one reward column", row);

  RewardSchedule schedule;
  while (std::getline(ss, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_row(line);
    if (int(cells.size()) != d + 1) {
      throw parse_error("ragged row " + std::to_string(row) + ": expected " +
                            std::to_string(d + 1) + " cells, got " +
                            std::to_string(cells.size()),
                        row);
    }
    const double t = parse_cell(cells[0], row);
    if (!schedule.breakpoints.empty() && !(t > schedule.breakpoints.back())) {
      throw parse_error("unsorted breakpoint in row " + std::to_string(row), row);
    }
    Vector value(d);
    for (int a = 0; a < d; ++a) {
      value(a) = parse_cell(cells[a + 1], row);
      if (value(a) < 0.0 || value(a) > 1.0) {
        throw parse_error("reward outside [0,1] in row " + std::to_string(row),
                          row);
      }
    }
    schedule.breakpoints.push_back(t);
    schedule.values.push_back(std::move(value));
  }

  if (schedule.breakpoints.empty()) {
    throw parse_error("schedule must cover t = 0 (no data rows)", row);
  }
  if (schedule.breakpoints.front() != 0.0) {
    throw parse_error("schedule must cover t = 0 (first breakpoint is " +
                          std::to_string(schedule.breakpoints.front()) + ")",
                      2);
  }
  return schedule;
}

std::string serialize_schedule(const RewardSchedule& schedule) {
  std::ostringstream out;
  out.precision(17);
  out << "t";
  for (int a = 1; a <= schedule.dim(); ++a) out << ",r_" << a;
  out << "\n";
  for (std::size_t i = 0; i < schedule.breakpoints.size(); ++i) {
    out << schedule.breakpoints[i];
    for (int a = 0; a < schedule.dim(); ++a) out << "," << schedule.values[i](a);
    out << "\n";
  }
  return out.str();
}

RewardPath RewardPath::constant(Vector values, double horizon) {
  if (values.size() == 0 || !in_unit_interval(values)) {
    throw std::domain_error("constant reward must lie in [0,1]^d");
  }
  RewardPath path(Kind::kConstant, int(values.size()), horizon);
  path.constant_ = std::move(values);
  return path;
}

RewardPath RewardPath::sinusoid(Vector omega, Vector phase, double horizon) {
  if (omega.size() == 0 || omega.size() != phase.size()) {
    throw std::domain_error("sinusoid omega and phase must have equal nonzero size");
  }
  validate_finite(omega);
  validate_finite(phase);
  RewardPath path(Kind::kSinusoid, int(omega.size()), horizon);
  path.omega_ = std::move(omega);
  path.phase_ = std::move(phase);
  return path;
}

RewardPath RewardPath::piecewise(RewardSchedule schedule, double horizon) {
  schedule.validate(horizon);
  RewardPath path(Kind::kPiecewiseConstant, schedule.dim(), horizon);
  path.schedule_ = std::move(schedule);
  return path;
}

RewardPath RewardPath::from_csv(const std::string& csv_text, double horizon) {
  return piecewise(load_schedule(csv_text), horizon);
}

Vector RewardPath::eval(double t) const {
  if (!(t >= 0.0) || !(t <= horizon_)) {
    throw std::out_of_range("reward path evaluated outside [0, T]");
  }
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kSinusoid:
      return (1.0 + (omega_.array() * t + phase_.array()).sin()) / 2.0;
    case Kind::kPiecewiseConstant: {
      // Right-open intervals: the interval containing t is the last
      // breakpoint <= t.
      const auto& bp = schedule_.breakpoints;
      const auto it = std::upper_bound(bp.begin(), bp.end(), t);
      const auto idx = std::size_t(std::distance(bp.begin(), it)) - 1;
      return schedule_.values[idx];
    }
  }
  throw std::logic_error("unreachable reward kind");
}

Vector RewardPath::cumulative(double t, const TimeGrid& grid) const {
  const std::int64_t upto = grid.index_of(t);
  Vector acc = Vector::Zero(dim_);
  for (std::int64_t i = 0; i < upto; ++i) acc += eval(grid.time(i));
  return acc * grid.dt();
}

const RewardSchedule& RewardPath::schedule() const {
  if (kind_ != Kind::kPiecewiseConstant) {
    throw std::logic_error("only piecewise-constant paths carry a schedule");
  }
  return schedule_;
}

}  // namespace regretsim
