#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mixdil/filter.hpp"
#include "mixdil/lattice.hpp"

namespace mixdil {

enum class Role { lowpass, wavelet };

struct Channel {
  Role role;
  DilationMatrix dilation;
  FilterSeq primal;
  FilterSeq dual;
};

/// One lowpass channel (index 0) followed by s wavelet channels, each with its
/// own dilation. Lowpass filters are r x r, wavelet filters 1 x r.
class FilterBank {
 public:
  /// Throws InvariantViolation naming the failed rule.
  FilterBank(std::string name, int dim, int multiplicity, std::vector<Channel> channels);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int multiplicity() const { return r_; }
  /// Number of wavelet channels.
  int wavelets() const { return static_cast<int>(channels_.size()) - 1; }
  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(int l) const { return channels_.at(l); }
  const Channel& lowpass() const { return channels_.front(); }

  friend bool operator==(const FilterBank& a, const FilterBank& b);

 private:
  std::string name_;
  int dim_;
  int r_;
  std::vector<Channel> channels_;
};

bool operator==(const FilterBank& a, const FilterBank& b);

FilterBank builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Exchanges primal and dual filters in every channel.
FilterBank dual_swapped(const FilterBank& bank);
/// Replaces the duals by the primals.
FilterBank self_dual(const FilterBank& bank);

std::string bank_to_json(const FilterBank& bank);
/// Throws FormatError or InvariantViolation.
FilterBank bank_from_json(const std::string& text);
FilterBank load_bank(const std::filesystem::path& path);
void save_bank(const FilterBank& bank, const std::filesystem::path& path);

}  // namespace mixdil
