"""Static plot rendering."""
