// qasrl/error.h

// Copyright 2026  QA-SRL Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef QASRL_ERROR_H_
#define QASRL_ERROR_H_

#include <stdexcept>
#include <string>

namespace qasrl {

/// Bad input: malformed files, invariant violations, out-of-vocabulary values.
/// The command-line tool maps this to exit status 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A corpus line that failed to parse or violated a record invariant.
class CorpusError : public ValidationError {
 public:
  CorpusError(const std::string& message, long line = 0, std::string sentence_id = {})
      : ValidationError(format(message, line, sentence_id)),
        detail_(message),
        line_(line),
        sentence_id_(std::move(sentence_id)) {}

  /// Copy with a line number attached.
  CorpusError at_line(long line) const { return CorpusError(detail_, line, sentence_id_); }

  const std::string& detail() const { return detail_; }
  long line() const { return line_; }
  const std::string& sentence_id() const { return sentence_id_; }

 private:
  static std::string format(const std::string& message, long line, const std::string& id) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!id.empty()) out += "sentence '" + id + "': ";
    return out + message;
  }

  std::string detail_;
  long line_;
  std::string sentence_id_;
};

}  // namespace qasrl

#endif  // QASRL_ERROR_H_
