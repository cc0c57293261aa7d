# maintenance entry points, run as python -m app.tools.<name>
