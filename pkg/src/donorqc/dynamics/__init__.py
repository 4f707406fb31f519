"""RF-driven spin dynamics: pulses, propagation, gates and robust pulse design."""
