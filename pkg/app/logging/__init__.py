# run log writer
