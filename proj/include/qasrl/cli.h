// qasrl/cli.h

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

#ifndef QASRL_CLI_H_
#define QASRL_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace qasrl {

/// Runs the `qasrl` command line; args excludes the program name.
/// Returns 0 on success, 2 on bad input (flags, files, records) and 1 on
/// internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qasrl

#endif  // QASRL_CLI_H_
