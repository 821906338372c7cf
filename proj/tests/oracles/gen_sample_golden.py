#!/usr/bin/env python3
# Copyright 2026 The trackr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Row indices chosen by set_seed(s); sample_rows(t, n) on an N-row table.

MINSTD: state' = 48271 * state mod (2^31 - 1); seed 0 is mapped to 1.
Partial Fisher-Yates: position i swaps with i + next() mod (N - i).
"""
import sys

M = 2**31 - 1


def sample(seed, population, n):
    state = seed % M or 1
    perm = list(range(population))
    for i in range(n):
        state = state * 48271 % M
        j = i + state % (population - i)
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:n], state


CASES = [(620, 10, 3), (620, 10, 10), (2026, 50, 7), (7, 3000, 5), (123456789, 10000, 4)]


def main(out):
    with open(out, "w") as f:
        f.write("seed\tpopulation\tn\tstate_after\tindices\n")
        for seed, population, n in CASES:
            rows, state = sample(seed, population, n)
            f.write(f"{seed}\t{population}\t{n}\t{state}\t{','.join(map(str, rows))}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "sample_rows_golden.tsv")
