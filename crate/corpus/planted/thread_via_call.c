/* planted: the inverted order only shows up through the helper call */
static void touch_stats(void)
{
	mutex_lock(&stats_lock);
	hits = hits + 1;
	mutex_unlock(&stats_lock);
}

void handle_request(void)
{
	mutex_lock(&req_lock);
	touch_stats();
	mutex_unlock(&req_lock);
}

void dump_stats(void)
{
	mutex_lock(&stats_lock);
	mutex_lock(&req_lock);
	print_stats();
	mutex_unlock(&req_lock);
	mutex_unlock(&stats_lock);
}
