// qasrl/http.h

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

#ifndef QASRL_HTTP_H_
#define QASRL_HTTP_H_

#include <string>

#include "qasrl/annosvc.h"

namespace httplib {
class Server;
}

namespace qasrl {

/// What a worker sees for a task: sentence, verb inflections and, for
/// validation, the questions with their rendered text (answers hidden).
Json task_view(const Service& service, const Task& task);

/// Next-slot completions for a comma-separated prefix of slot value names,
/// plus suggestions given prior questions. Mirrors GET /api/autocomplete.
Json autocomplete_json(const Grammar& grammar, const std::string& verb_stem, const std::string& prefix,
                       const Json& prior);

/// Registers the /api routes on `server`.
void install_routes(httplib::Server& server, Service& service);

}  // namespace qasrl

#endif  // QASRL_HTTP_H_
