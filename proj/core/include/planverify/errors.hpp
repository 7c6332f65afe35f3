#pragma once

#include <stdexcept>
#include <string>

namespace planverify {

/// An index argument fell outside the valid range of a plan or trace.
class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace planverify
