# persistence-cdga
# Exact persistence CDGAs of relative Sullivan models: barcodes, distances and interleavings

__version__ = "0.1.0"
