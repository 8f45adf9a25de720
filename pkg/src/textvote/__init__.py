"""Short-text classification by voting over embedding-based baselines and a bag-of-words SVM.

Modules:

- :mod:`textvote.corpus`      datasets, vocabularies
- :mod:`textvote.embeddings`  SGNS / CWE+P / CWE+L / fastText embedding training and queries
- :mod:`textvote.nets`        NBoW, CNN and LSTM classifiers
- :mod:`textvote.bow_svm`     bag-of-words one-vs-rest linear SVM
- :mod:`textvote.ensemble`    plurality vote trees and prediction files
- :mod:`textvote.metrics`     accuracy and macro precision / recall / F1
- :mod:`textvote.cli`         the ``textvote`` command
"""

__version__ = "0.1.0"
