# Copyright 2026 The OSNIP Lab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the osnip pipeline and its building blocks."""

from ._osnip import (
    ConfigError,
    IoError,
    NumericError,
    band_complement_bound,
    encrypt,
    exact_band_mass,
    generate_corpus,
    mc_band_mass,
    random_key,
    resolved_config,
    run,
    subcommands,
    version,
)

__all__ = [
    "ConfigError",
    "IoError",
    "NumericError",
    "band_complement_bound",
    "encrypt",
    "exact_band_mass",
    "generate_corpus",
    "mc_band_mass",
    "random_key",
    "resolved_config",
    "run",
    "subcommands",
    "version",
]
