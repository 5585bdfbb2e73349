/*
 * Copyright 2026 The lstree Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LSTREE_EXECUTION_H_
#define LSTREE_EXECUTION_H_

namespace lstree {

// Every parallel kernel keeps a serial path with identical results; the
// serial path is the reference the tests compare against.
enum class Execution { kSerial, kParallel };

// Number of OpenMP threads available, 1 when built without OpenMP.
int MaxThreads();

}  // namespace lstree

#endif  // LSTREE_EXECUTION_H_
